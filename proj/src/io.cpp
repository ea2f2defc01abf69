#include "fracdual/io.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace fracdual {

using nlohmann::json;

std::string format_double(double v) {
  std::string s = fmt::format("{:.17g}", v);
  if (s.find_first_of(".eEni") == std::string::npos) s += ".0";
  return s;
}

namespace {

bool is_scalar(const json& j) { return !j.is_array() && !j.is_object(); }

void write_canonical(const json& j, int indent, std::string& out) {
  const std::string pad(indent, ' ');
  const std::string inner(indent + 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(key).dump() + ": ";
        write_canonical(value, indent + 2, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      const bool flat = std::all_of(j.begin(), j.end(), is_scalar);
      if (flat) {
        out += "[";
        for (size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write_canonical(j[i], indent, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        write_canonical(j[i], indent + 2, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

std::string canonical(const json& j) {
  std::string out;
  write_canonical(j, 0, out);
  out += "\n";
  return out;
}

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_array(const Matrix& m) {
  // row-major
  json arr = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
  return arr;
}

json to_array(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

[[noreturn]] void parse_fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kParse, "field '" + field + "': " + what);
}

const json& field(const json& root, const std::string& name) {
  auto it = root.find(name);
  if (it == root.end()) parse_fail(name, "missing");
  return *it;
}

long long read_integer(const json& root, const std::string& name) {
  const json& j = field(root, name);
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_float()) {
    const double d = j.get<double>();
    if (std::floor(d) == d && std::abs(d) < 1e15) return static_cast<long long>(d);
  }
  parse_fail(name, "expected an integer");
}

double read_real(const json& root, const std::string& name) {
  const json& j = field(root, name);
  if (!j.is_number()) parse_fail(name, "expected a number");
  return j.get<double>();
}

std::vector<double> read_reals(const json& root, const std::string& name, long long expected) {
  const json& j = field(root, name);
  if (!j.is_array()) parse_fail(name, "expected an array");
  if (static_cast<long long>(j.size()) != expected) {
    parse_fail(name, "expected " + std::to_string(expected) + " entries, got " + std::to_string(j.size()));
  }
  std::vector<double> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) parse_fail(name + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

Matrix row_major(const std::vector<double>& values, long long rows, long long cols) {
  Matrix m(rows, cols);
  for (long long r = 0; r < rows; ++r)
    for (long long c = 0; c < cols; ++c) m(r, c) = values[r * cols + c];
  return m;
}

}  // namespace

std::string serialize_instance(const ProgramData& data) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = data.Q.rows();
  j["m"] = data.B.rows();
  j["Q"] = to_array(data.Q);
  j["f"] = to_array(data.f);
  j["B"] = to_array(data.B);
  j["lambda"] = data.lambda;
  j["H"] = to_array(data.H);
  j["b"] = to_array(data.b);
  j["delta"] = data.delta;
  return canonical(j);
}

ProgramData parse_instance_data(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorCode::kParse, "top level must be an object");

  const long long version = read_integer(root, "schema_version");
  if (version != kSchemaVersion) parse_fail("schema_version", "unsupported version " + std::to_string(version));
  const long long n = read_integer(root, "n");
  const long long m = read_integer(root, "m");
  if (n < 1) parse_fail("n", "must be positive");
  if (m < 0) parse_fail("m", "must be nonnegative");

  ProgramData d;
  d.Q = row_major(read_reals(root, "Q", n * n), n, n);
  d.f = Eigen::Map<const Vector>(read_reals(root, "f", n).data(), n);
  d.B = row_major(read_reals(root, "B", m * n), m, n);
  d.lambda = read_real(root, "lambda");
  d.H = row_major(read_reals(root, "H", n * n), n, n);
  const auto b = read_reals(root, "b", n);
  d.b = Eigen::Map<const Vector>(b.data(), n);
  d.delta = read_real(root, "delta");
  return d;
}

FractionalProgram parse_instance(std::string_view text) {
  return FractionalProgram::validate(parse_instance_data(text));
}

ProgramData generate_instance(const GeneratorOptions& opts) {
  if (opts.n < 1) throw Error(ErrorCode::kShapeMismatch, "generator needs n >= 1");
  if (opts.m < 0) throw Error(ErrorCode::kShapeMismatch, "generator needs m >= 0");
  const int n = opts.n, m = opts.m;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto random_matrix = [&](int rows, int cols) {
    Matrix a(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) a(r, c) = unit(rng);
    return a;
  };
  auto random_vector = [&](int len) {
    Vector v(len);
    for (int i = 0; i < len; ++i) v[i] = unit(rng);
    return v;
  };

  ProgramData d;
  const Matrix q = random_matrix(n, n);
  d.Q = 0.5 * (q + q.transpose());
  d.f = random_vector(n);
  d.B = random_matrix(m, n);
  const Matrix a = random_matrix(n, n);
  const Matrix neg_h = opts.conditioning * (a.transpose() * a) + Matrix::Identity(n, n);
  d.H = -0.5 * (neg_h + neg_h.transpose());

  const Eigen::LLT<Matrix> llt(-d.H);
  bool found = false;
  for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
    d.b = random_vector(n);
    // h(H^{-1} b) = 1/2 b'(-H)^{-1} b
    found = 0.5 * d.b.dot(llt.solve(d.b)) > 0.1;
  }
  if (!found) throw Error(ErrorCode::kMu0NotPositive, "no b with h(H^{-1} b) > 0.1 after 1000 draws");

  std::uniform_real_distribution<double> lambda_dist(0.0, 2.0);
  std::uniform_real_distribution<double> ratio_dist(0.2, 0.9);
  d.lambda = lambda_dist(rng);
  const double h_max = 0.5 * d.b.dot(llt.solve(d.b));
  d.delta = ratio_dist(rng) * h_max;
  return d;
}

std::string serialize_result(const SolveResult& r, const SolverOptions& opts, const Timings& timings) {
  json j;
  j["x_star"] = to_array(r.x_star);
  j["mu_star"] = r.mu_star;
  j["varsigma"] = r.d_star.varsigma;
  j["sigma"] = r.d_star.sigma;
  j["primal_value"] = r.P0_value;
  j["dual_value"] = r.best_dual_value;
  j["gap"] = r.certificate.gap;
  j["certificate_kind"] = std::string(to_string(r.certificate.kind));
  j["dual_status"] = std::string(to_string(r.dual_status));
  j["stationarity_xi"] = r.certificate.stationarity_xi;
  j["feasibility_residual"] = r.certificate.feasibility_residual;
  j["subproblems_evaluated"] = r.evaluated_subproblems;
  j["subproblems_certified"] = r.certified_subproblems;

  json profile = json::array();
  for (const MuSample& s : r.mu_profile) {
    json row;
    row["mu"] = s.mu;
    row["dual_optimum"] = real_or_null(s.dual_optimum);
    row["p0_value"] = real_or_null(s.p0_value);
    row["dual_status"] = std::string(to_string(s.status));
    row["certificate_kind"] = s.solved ? std::string(to_string(s.kind)) : std::string("NoStartingPoint");
    profile.push_back(row);
  }
  j["mu_profile"] = profile;

  json o;
  o["grid"] = opts.grid;
  o["max_iter"] = opts.max_iter;
  o["tol_grad"] = opts.tol_grad;
  o["tol_gap"] = opts.tol_gap;
  o["tol_stationarity"] = opts.tol_stationarity;
  o["tol_feasibility"] = opts.tol_feasibility;
  o["refine_rounds"] = opts.refine_rounds;
  o["seed"] = opts.seed;
  o["threads"] = opts.threads;
  j["solver_options"] = o;

  json t;
  t["solve_seconds"] = timings.solve_seconds;
  j["timings"] = t;
  return canonical(j);
}

std::string sweep_csv(const SolveResult& result) {
  std::string out = "mu,dual_optimum,certificate_kind\n";
  for (const MuSample& s : result.mu_profile) {
    out += format_double(s.mu) + ",";
    out += s.solved ? format_double(s.dual_optimum) : std::string("nan");
    out += ",";
    out += s.solved ? std::string(to_string(s.kind)) : std::string("NoStartingPoint");
    out += "\n";
  }
  return out;
}

std::string landscape_csv(const FractionalProgram& p, const LandscapeSpec& spec) {
  if (spec.varsigma_points < 1 || spec.sigma_points < 1) {
    throw Error(ErrorCode::kShapeMismatch, "landscape needs at least one point per axis");
  }
  double vs_lo = -p.lambda(), vs_hi = -p.lambda() + 2.0;
  double s_lo = 0.0, s_hi = 2.0;
  if (!spec.varsigma_range || !spec.sigma_range) {
    try {
      const DualSolution sol = maximize_dual(p, spec.mu);
      vs_hi = -p.lambda() + 2.0 * std::max(1.0, sol.d_star.varsigma + p.lambda());
      s_hi = 2.0 * std::max(1.0, sol.d_star.sigma);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoStartingPoint) throw;
    }
  }
  if (spec.varsigma_range) std::tie(vs_lo, vs_hi) = *spec.varsigma_range;
  if (spec.sigma_range) std::tie(s_lo, s_hi) = *spec.sigma_range;

  auto axis = [](double lo, double hi, int count, int i) {
    return count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  };
  std::string out = "varsigma,sigma,dual_value\n";
  for (int i = 0; i < spec.varsigma_points; ++i) {
    for (int k = 0; k < spec.sigma_points; ++k) {
      const DualPoint d{spec.mu, axis(vs_lo, vs_hi, spec.varsigma_points, i),
                        axis(s_lo, s_hi, spec.sigma_points, k)};
      const auto ev = evaluate_dual(p, d);
      out += format_double(d.varsigma) + "," + format_double(d.sigma) + ",";
      out += ev ? format_double(ev->value) : std::string("nonPD");
      out += "\n";
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw Error(ErrorCode::kIo, "write to '" + path + "' failed");
}

}  // namespace fracdual
