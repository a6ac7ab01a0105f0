#include "binfam/params_io.hpp"

#include <fstream>
#include <set>

#include "binfam/errors.hpp"

namespace binfam {

using nlohmann::json;

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ValidationError(std::string(what) + " must be a nonempty matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols)
      throw ValidationError(std::string(what) + " must be rectangular");
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!j[i][c].is_number()) throw ValidationError(std::string(what) + " entries must be numbers");
      m(i, c) = j[i][c].get<double>();
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ValidationError(std::string(what) + " must be a nonempty array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ValidationError(std::string(what) + " entries must be numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

void require_keys(const json& doc, const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.contains(key)) throw ValidationError("unknown field '" + key + "' in parameter file");
  }
  for (const auto& key : required)
    if (!doc.contains(key)) throw ValidationError("missing field '" + key + "' in parameter file");
}

}  // namespace

json params_to_json(const FamilyParams& params) {
  json doc;
  doc["version"] = kParamSchemaVersion;
  doc["d"] = family_dim(params);
  doc["family"] = family_name(params);

  if (const auto* p = std::get_if<ProductParams>(&params)) {
    doc["mean"] = vector_to_json(p->mean);
  } else if (const auto* p = std::get_if<LinQuParams>(&params)) {
    doc["a0"] = p->a0();
    doc["A"] = matrix_to_json(p->A());
  } else if (const auto* p = std::get_if<ExpQuParams>(&params)) {
    doc["A"] = matrix_to_json(p->A);
  } else if (const auto* p = std::get_if<LogCoParams>(&params)) {
    json triplets = json::array();
    for (std::size_t i = 0; i < p->dim(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      triplets.push_back(json::array({i + 1, i + 1, p->B(ii, ii)}));
      for (int j : p->predictors[i])
        triplets.push_back(json::array({i + 1, j + 1, p->B(ii, static_cast<Eigen::Index>(j))}));
    }
    doc["B"] = std::move(triplets);
    json indep = json::array();
    for (int i : p->independent) indep.push_back(i + 1);
    doc["independent"] = std::move(indep);
    json preds = json::object();
    for (std::size_t i = 0; i < p->dim(); ++i) {
      if (p->predictors[i].empty()) continue;
      json lst = json::array();
      for (int j : p->predictors[i]) lst.push_back(j + 1);
      preds[std::to_string(i + 1)] = std::move(lst);
    }
    doc["predictors"] = std::move(preds);
  } else if (const auto* p = std::get_if<GauCParams>(&params)) {
    doc["mu"] = vector_to_json(p->mu);
    doc["sigma"] = matrix_to_json(p->sigma);
    doc["repair_shift"] = p->repair_shift;
    json assoc = json::array();
    for (const auto& [i, j] : p->association) assoc.push_back(json::array({i + 1, j + 1}));
    doc["association"] = std::move(assoc);
  } else if (const auto* p = std::get_if<PoiParams>(&params)) {
    json sets = json::array();
    for (const auto& s : p->sets) {
      json one = json::array();
      for (int k : s) one.push_back(k + 1);
      sets.push_back(std::move(one));
    }
    doc["sets"] = std::move(sets);
    doc["lambda"] = vector_to_json(p->lambda);
  }
  return doc;
}

FamilyParams params_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("parameter file must be a JSON object");
  if (!doc.contains("version") || doc["version"] != kParamSchemaVersion)
    throw ValidationError("unsupported or missing parameter schema version");
  if (!doc.contains("family") || !doc["family"].is_string())
    throw ValidationError("parameter file must name a family");
  if (!doc.contains("d") || !doc["d"].is_number_unsigned())
    throw ValidationError("parameter file must carry the dimension d");
  const std::string family = doc["family"].get<std::string>();
  const auto d = doc["d"].get<std::size_t>();
  const std::set<std::string> common = {"version", "d", "family", "fit_report"};

  auto check_dim = [&](std::size_t got, const char* what) {
    if (got != d) throw ValidationError(std::string(what) + " does not match the declared dimension");
  };

  if (family == "product") {
    std::set<std::string> allowed = common;
    allowed.insert("mean");
    require_keys(doc, allowed, {"mean"});
    Eigen::VectorXd mean = vector_from_json(doc["mean"], "mean");
    check_dim(static_cast<std::size_t>(mean.size()), "mean");
    for (Eigen::Index i = 0; i < mean.size(); ++i)
      if (!(mean[i] >= 0.0 && mean[i] <= 1.0)) throw ValidationError("means must lie in [0,1]");
    return ProductParams{std::move(mean)};
  }
  if (family == "linquad") {
    std::set<std::string> allowed = common;
    allowed.insert("a0");
    allowed.insert("A");
    require_keys(doc, allowed, {"a0", "A"});
    if (!doc["a0"].is_number()) throw ValidationError("a0 must be a number");
    Eigen::MatrixXd A = matrix_from_json(doc["A"], "A");
    check_dim(static_cast<std::size_t>(A.rows()), "A");
    return LinQuParams::make(std::move(A), doc["a0"].get<double>());
  }
  if (family == "expquad") {
    std::set<std::string> allowed = common;
    allowed.insert("A");
    require_keys(doc, allowed, {"A"});
    Eigen::MatrixXd A = matrix_from_json(doc["A"], "A");
    check_dim(static_cast<std::size_t>(A.rows()), "A");
    return make_expquad(std::move(A));
  }
  if (family == "logcond") {
    std::set<std::string> allowed = common;
    allowed.insert("B");
    allowed.insert("independent");
    allowed.insert("predictors");
    require_keys(doc, allowed, {"B", "independent", "predictors"});
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    if (!doc["B"].is_array()) throw ValidationError("B must be an array of [i, j, value] triplets");
    for (const auto& t : doc["B"]) {
      if (!t.is_array() || t.size() != 3) throw ValidationError("B entries must be [i, j, value] triplets");
      const long i = t[0].get<long>() - 1;
      const long j = t[1].get<long>() - 1;
      if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= d || static_cast<std::size_t>(j) >= d || j > i)
        throw ValidationError("B triplet index out of the lower triangle");
      B(i, j) = t[2].get<double>();
    }
    std::vector<int> independent;
    for (const auto& v : doc["independent"]) {
      const long i = v.get<long>() - 1;
      if (i < 0 || static_cast<std::size_t>(i) >= d) throw ValidationError("independent index out of range");
      independent.push_back(static_cast<int>(i));
    }
    std::vector<std::vector<int>> predictors(d);
    if (!doc["predictors"].is_object()) throw ValidationError("predictors must be an object");
    for (const auto& [key, lst] : doc["predictors"].items()) {
      const long i = std::stol(key) - 1;
      if (i < 0 || static_cast<std::size_t>(i) >= d) throw ValidationError("predictor key out of range");
      for (const auto& v : lst) {
        const long j = v.get<long>() - 1;
        if (j < 0 || j >= i) throw ValidationError("predictor index out of range");
        predictors[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
      }
    }
    return make_logcond(std::move(B), std::move(independent), std::move(predictors));
  }
  if (family == "gaussian_copula") {
    std::set<std::string> allowed = common;
    allowed.insert("mu");
    allowed.insert("sigma");
    allowed.insert("repair_shift");
    allowed.insert("association");
    require_keys(doc, allowed, {"mu", "sigma"});
    GauCParams p;
    p.mu = vector_from_json(doc["mu"], "mu");
    check_dim(static_cast<std::size_t>(p.mu.size()), "mu");
    p.sigma = matrix_from_json(doc["sigma"], "sigma");
    check_dim(static_cast<std::size_t>(p.sigma.rows()), "sigma");
    if (p.sigma.rows() != p.sigma.cols()) throw ValidationError("sigma must be square");
    if (doc.contains("repair_shift")) {
      p.repair_shift = doc["repair_shift"].get<double>();
      p.pd_repaired = p.repair_shift > 0.0;
    }
    if (doc.contains("association")) {
      for (const auto& pr : doc["association"]) {
        if (!pr.is_array() || pr.size() != 2) throw ValidationError("association entries must be pairs");
        p.association.emplace_back(pr[0].get<int>() - 1, pr[1].get<int>() - 1);
      }
    }
    return p;
  }
  if (family == "poisson") {
    std::set<std::string> allowed = common;
    allowed.insert("sets");
    allowed.insert("lambda");
    require_keys(doc, allowed, {"sets", "lambda"});
    Eigen::VectorXd lambda = vector_from_json(doc["lambda"], "lambda");
    std::vector<std::vector<int>> sets;
    if (!doc["sets"].is_array()) throw ValidationError("sets must be an array of index arrays");
    for (const auto& s : doc["sets"]) {
      std::vector<int> one;
      for (const auto& v : s) one.push_back(v.get<int>() - 1);
      sets.push_back(std::move(one));
    }
    check_dim(sets.size(), "sets");
    const auto var_count = static_cast<std::size_t>(lambda.size());
    return make_poisson(var_count, std::move(sets), std::move(lambda));
  }
  throw ValidationError("unknown family '" + family + "'");
}

void save_params(const std::string& path, const FamilyParams& params, const json& fit_report) {
  json doc = params_to_json(params);
  if (!fit_report.is_null()) doc["fit_report"] = fit_report;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("failed writing '" + path + "'");
}

LoadedParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in '" + path + "': " + e.what());
  }
  LoadedParams out{params_from_json(doc), json()};
  if (doc.contains("fit_report")) out.fit_report = doc["fit_report"];
  return out;
}

}  // namespace binfam
