#pragma once

// Run configuration: JSON encoding with complex entries as [re, im] pairs.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gbdt/engine.hpp"

namespace gbdt::cli {

using Json = nlohmann::ordered_json;

struct SeedBlock {
  std::vector<double> d;
  std::vector<double> dhat;
  std::vector<double> b;
  std::string type = "zero";

  bool operator==(const SeedBlock&) const = default;
};

struct GbdtBlock {
  CMatrix A;
  CMatrix Pi0;
  CMatrix S0;

  bool operator==(const GbdtBlock& o) const {
    auto same = [](const CMatrix& a, const CMatrix& b) {
      return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
    };
    return same(A, o.A) && same(Pi0, o.Pi0) && same(S0, o.S0);
  }
};

struct GridBlock {
  double x0 = 0.0;
  double x1 = 1.0;
  int nx = 11;
  double t0 = 0.0;
  double t1 = 1.0;
  int nt = 11;

  double x(int i) const { return nx == 1 ? x0 : x0 + (x1 - x0) * i / (nx - 1); }
  double t(int j) const { return nt == 1 ? t0 : t0 + (t1 - t0) * j / (nt - 1); }
  bool operator==(const GridBlock&) const = default;
};

struct MethodBlock {
  std::string kind = "exact";
  double h = 1e-3;

  bool operator==(const MethodBlock&) const = default;
};

struct Tolerances {
  double exact = 1e-10;
  double rk4 = 1e-7;
  double symmetry = 1e-12;
  double unitarity = 1e-10;
  double conservation = 1e-12;
  double bispectral = 1e-10;
  double fd = 1e-5;       // finite-difference residual bound at step fd_step
  double fd_step = 1e-3;  // also the default verification step
  double condition_limit = kDefaultConditionLimit;

  /// fd bound rescaled quadratically to step h.
  double fd_at(double h) const { return fd * (h / fd_step) * (h / fd_step); }
  bool operator==(const Tolerances&) const = default;
};

struct OutputBlock {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};

  bool wants(const std::string& f) const {
    for (const auto& x : formats)
      if (x == f) return true;
    return false;
  }
  bool operator==(const OutputBlock&) const = default;
};

struct DiracBlock {
  int m1 = 1;
  int m2 = 1;
  std::string kind = "skewselfadjoint";

  bool operator==(const DiracBlock&) const = default;
};

struct RunConfig {
  std::string name;
  SeedBlock seed;
  GbdtBlock gbdt;
  GridBlock grid;
  std::vector<Complex> z_samples;
  MethodBlock method;
  Tolerances tolerances;
  OutputBlock output;
  bool allow_negative_domain = false;
  std::optional<double> lambda;
  std::optional<DiracBlock> dirac;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

[[noreturn]] inline void bad(const std::string& what) { fail(ErrorKind::InvalidConfig, what); }

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double number(const Json& j, const std::string& what) {
  if (!j.is_number()) bad(what + " must be a number");
  return j.get<double>();
}

inline int integer(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) bad(what + " must be an integer");
  return j.get<int>();
}

inline std::vector<double> numbers(const Json& j, const std::string& what) {
  if (!j.is_array()) bad(what + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

inline Complex complex_value(const Json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) bad(what + " must be [re, im]");
  return {number(j[0], what), number(j[1], what)};
}

inline Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

inline CMatrix matrix(const Json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    bad(what + " must have " + std::to_string(rows) + " rows");
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      bad(what + " must have " + std::to_string(cols) + " columns");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_value(row[static_cast<std::size_t>(k)], what);
  }
  return m;
}

inline Json matrix_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline RunConfig parse_config(const Json& j) {
  using namespace detail;
  RunConfig c;
  if (j.contains("name")) c.name = j.at("name").get<std::string>();

  const Json& seed = field(j, "seed");
  const int m = integer(field(seed, "m"), "seed.m");
  if (m < 1) bad("seed.m must be positive");
  c.seed.d = numbers(field(seed, "d"), "seed.d");
  c.seed.dhat = numbers(field(seed, "dhat"), "seed.dhat");
  c.seed.b = numbers(field(seed, "b"), "seed.b");
  if (seed.contains("type")) c.seed.type = seed.at("type").get<std::string>();
  if (c.seed.type != "zero") bad("only the zero seed can be configured from a file");
  for (const auto* v : {&c.seed.d, &c.seed.dhat, &c.seed.b})
    if (static_cast<int>(v->size()) != m) bad("seed vectors must have length m");

  const Json& g = field(j, "gbdt");
  const int n = integer(field(g, "n"), "gbdt.n");
  if (n < 1) bad("gbdt.n must be positive");
  c.gbdt.A = matrix(field(g, "A"), n, n, "gbdt.A");
  c.gbdt.Pi0 = matrix(field(g, "Pi0"), n, m, "gbdt.Pi0");
  c.gbdt.S0 = matrix(field(g, "S0"), n, n, "gbdt.S0");

  const Json& grid = field(j, "grid");
  c.grid.x0 = number(field(grid, "x0"), "grid.x0");
  c.grid.x1 = number(field(grid, "x1"), "grid.x1");
  c.grid.nx = integer(field(grid, "nx"), "grid.nx");
  c.grid.t0 = number(field(grid, "t0"), "grid.t0");
  c.grid.t1 = number(field(grid, "t1"), "grid.t1");
  c.grid.nt = integer(field(grid, "nt"), "grid.nt");
  if (c.grid.nx < 2 || c.grid.nt < 2) bad("grid needs nx, nt >= 2");
  if (!(c.grid.x1 > c.grid.x0)) bad("grid needs x1 > x0");
  if (!(c.grid.t1 >= c.grid.t0)) bad("grid needs t1 >= t0");

  if (j.contains("z_samples"))
    for (const auto& z : j.at("z_samples")) c.z_samples.push_back(complex_value(z, "z_samples"));

  if (j.contains("method")) {
    const Json& mth = j.at("method");
    c.method.kind = field(mth, "kind").get<std::string>();
    if (mth.contains("h")) c.method.h = number(mth.at("h"), "method.h");
    if (c.method.kind != "exact" && c.method.kind != "rk4") bad("method.kind must be exact or rk4");
    if (!(c.method.h > 0.0)) bad("method.h must be positive");
  }

  if (j.contains("tolerances")) {
    const Json& t = j.at("tolerances");
    auto opt = [&](const char* key, double& slot) {
      if (t.contains(key)) slot = number(t.at(key), std::string("tolerances.") + key);
    };
    opt("exact", c.tolerances.exact);
    opt("rk4", c.tolerances.rk4);
    opt("symmetry", c.tolerances.symmetry);
    opt("unitarity", c.tolerances.unitarity);
    opt("conservation", c.tolerances.conservation);
    opt("bispectral", c.tolerances.bispectral);
    opt("fd", c.tolerances.fd);
    opt("fd_step", c.tolerances.fd_step);
    opt("condition_limit", c.tolerances.condition_limit);
  }

  if (j.contains("output")) {
    const Json& o = j.at("output");
    if (o.contains("directory")) c.output.directory = o.at("directory").get<std::string>();
    if (o.contains("formats")) c.output.formats = o.at("formats").get<std::vector<std::string>>();
  }
  if (j.contains("allow_negative_domain"))
    c.allow_negative_domain = j.at("allow_negative_domain").get<bool>();
  if (j.contains("lambda")) c.lambda = number(j.at("lambda"), "lambda");
  if (j.contains("dirac")) {
    const Json& dj = j.at("dirac");
    DiracBlock d;
    d.m1 = integer(field(dj, "m1"), "dirac.m1");
    d.m2 = integer(field(dj, "m2"), "dirac.m2");
    d.kind = field(dj, "kind").get<std::string>();
    if (d.kind != "selfadjoint" && d.kind != "skewselfadjoint")
      bad("dirac.kind must be selfadjoint or skewselfadjoint");
    c.dirac = d;
  }
  return c;
}

inline Json to_json(const RunConfig& c) {
  using namespace detail;
  Json j;
  j["name"] = c.name;
  j["seed"] = {{"m", c.seed.d.size()}, {"d", c.seed.d}, {"dhat", c.seed.dhat}, {"b", c.seed.b},
               {"type", c.seed.type}};
  j["gbdt"] = {{"n", c.gbdt.A.rows()},
               {"A", matrix_json(c.gbdt.A)},
               {"Pi0", matrix_json(c.gbdt.Pi0)},
               {"S0", matrix_json(c.gbdt.S0)}};
  j["grid"] = {{"x0", c.grid.x0}, {"x1", c.grid.x1}, {"nx", c.grid.nx},
               {"t0", c.grid.t0}, {"t1", c.grid.t1}, {"nt", c.grid.nt}};
  Json zs = Json::array();
  for (Complex z : c.z_samples) zs.push_back(complex_json(z));
  j["z_samples"] = zs;
  j["method"] = {{"kind", c.method.kind}, {"h", c.method.h}};
  const auto& t = c.tolerances;
  j["tolerances"] = {{"exact", t.exact},
                     {"rk4", t.rk4},
                     {"symmetry", t.symmetry},
                     {"unitarity", t.unitarity},
                     {"conservation", t.conservation},
                     {"bispectral", t.bispectral},
                     {"fd", t.fd},
                     {"fd_step", t.fd_step},
                     {"condition_limit", t.condition_limit}};
  j["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats}};
  j["allow_negative_domain"] = c.allow_negative_domain;
  if (c.lambda) j["lambda"] = *c.lambda;
  if (c.dirac) j["dirac"] = {{"m1", c.dirac->m1}, {"m2", c.dirac->m2}, {"kind", c.dirac->kind}};
  return j;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidConfig, "cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidConfig, std::string("malformed JSON: ") + e.what());
  }
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidConfig, std::string("bad field type: ") + e.what());
  }
}

inline SeedSpec make_seed_spec(const RunConfig& c) {
  auto vec = [](const std::vector<double>& v) {
    return RVector(Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  return SeedSpec(vec(c.seed.d), vec(c.seed.dhat), vec(c.seed.b), ZeroSeed{});
}

inline GBDTParams make_params(const RunConfig& c) { return {c.gbdt.A, c.gbdt.Pi0, c.gbdt.S0}; }

}  // namespace gbdt::cli
