#include "sprox/polar_express.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sprox/errors.hpp"
#include "sprox/scalar_ref.hpp"

namespace sprox {

PolySchedule parse_schedule(const std::string& text, const std::string& name) {
  PolySchedule s;
  s.name = name;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<double> values;
    std::string tok;
    while (fields >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(v)) {
        throw ConfigError("schedule: bad coefficient '" + tok + "'", lineno);
      }
      values.push_back(v);
    }
    if (values.empty()) continue;
    if (values.size() != 3) {
      throw ConfigError("schedule: expected 3 coefficients, got " +
                            std::to_string(values.size()),
                        lineno);
    }
    s.iterations.push_back({values[0], values[1], values[2]});
  }
  return s;
}

PolySchedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("schedule: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_schedule(buf.str(), std::filesystem::path(path).stem().string());
}

std::string serialize_schedule(const PolySchedule& s) {
  std::ostringstream os;
  os.precision(17);
  os << "# " << s.name << "\n";
  for (const auto& [a, b, c] : s.iterations) os << a << " " << b << " " << c << "\n";
  return os.str();
}

std::string shipped_schedule_path(const std::string& name) {
  return std::string(SPROX_DATA_DIR) + "/schedules/" + name + ".txt";
}

PolySchedule default_schedule() {
  return load_schedule(shipped_schedule_path("polar_express"));
}

double apply_poly_scalar(const PolySchedule& s, double t) {
  for (const auto& [a, b, c] : s.iterations) {
    const double t2 = t * t;
    t = t * (a + t2 * (b + c * t2));
  }
  return t;
}

Eigen::MatrixXd apply_poly_matrix_raw(const PolySchedule& s, const Eigen::MatrixXd& M) {
  Eigen::MatrixXd X = M;
  const Eigen::Index n = X.cols();
  for (const auto& [a, b, c] : s.iterations) {
    const Eigen::MatrixXd G = X.transpose() * X;
    const Eigen::MatrixXd P = a * Eigen::MatrixXd::Identity(n, n) + b * G + c * G * G;
    X = X * P;
  }
  return X;
}

Eigen::MatrixXd apply_poly_matrix(const PolySchedule& s, const Eigen::MatrixXd& M,
                                  double eps_hat) {
  if (!M.allFinite()) throw InvalidInput("polar express: non-finite input");
  if (!(eps_hat >= 0.0)) throw InvalidConfig("polar express: eps_hat must be >= 0");
  const double scale = M.norm() + eps_hat;
  if (scale == 0.0) return Eigen::MatrixXd::Zero(M.rows(), M.cols());
  return apply_poly_matrix_raw(s, M / scale);
}

FitReport fit_report(const PolySchedule& s, double epsilon, double kappa,
                     const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidConfig("fit report: empty grid");
  const ScalarRef h = ScalarRef::hyper_kappa(epsilon, kappa);
  FitReport r;
  for (double t : grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidConfig("fit report: grid must lie in [0, 1]");
    const double p = apply_poly_scalar(s, t);
    const double pre = h.h_star_prime(t);
    const double sg = t > 0.0 ? 1.0 : 0.0;
    r.t.push_back(t);
    r.poly.push_back(p);
    r.preconditioner.push_back(pre);
    r.sign.push_back(sg);
    r.max_dev_vs_preconditioner = std::max(r.max_dev_vs_preconditioner, std::abs(p - pre));
    r.max_dev_vs_sign = std::max(r.max_dev_vs_sign, std::abs(p - sg));
  }
  return r;
}

std::vector<double> uniform_grid(int n) {
  if (n < 1) throw InvalidConfig("grid needs at least one point");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = 1.0;
    return g;
  }
  for (int i = 0; i < n; ++i) g[i] = static_cast<double>(i) / (n - 1);
  return g;
}

}  // namespace sprox
