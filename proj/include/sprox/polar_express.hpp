#pragma once

// Odd-polynomial matrix-sign iterations and their fit against the
// HyperKappa preconditioner.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sprox {

// p(t) = a t + b t^3 + c t^5 per iteration, applied in order.
struct PolySchedule {
  std::string name;
  std::vector<std::array<double, 3>> iterations;

  bool operator==(const PolySchedule&) const = default;
};

// One iteration per non-comment line: three decimal coefficients separated
// by whitespace or commas. '#' starts a comment. Throws ConfigError with
// the offending line number.
PolySchedule parse_schedule(const std::string& text, const std::string& name);
PolySchedule load_schedule(const std::string& path);
std::string serialize_schedule(const PolySchedule& s);

// Path of a schedule shipped in the data directory ("polar_express",
// "newton_schulz5").
std::string shipped_schedule_path(const std::string& name);
// The shipped default used by the fit report and the optimizer surrogate.
PolySchedule default_schedule();

double apply_poly_scalar(const PolySchedule& s, double t);
// Iterates M <- M (a I + b G + c G^2), G = M^T M, without normalization.
Eigen::MatrixXd apply_poly_matrix_raw(const PolySchedule& s, const Eigen::MatrixXd& M);
// Normalizes by ||M||_F + eps_hat first.
Eigen::MatrixXd apply_poly_matrix(const PolySchedule& s, const Eigen::MatrixXd& M,
                                  double eps_hat);

struct FitReport {
  std::vector<double> t;
  std::vector<double> poly;
  std::vector<double> preconditioner;
  std::vector<double> sign;
  double max_dev_vs_preconditioner = 0.0;
  double max_dev_vs_sign = 0.0;
};

FitReport fit_report(const PolySchedule& s, double epsilon, double kappa,
                     const std::vector<double>& grid);
// n equally spaced points on [0, 1].
std::vector<double> uniform_grid(int n);

}  // namespace sprox
