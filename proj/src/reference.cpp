#include "sprox/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sprox/errors.hpp"
#include "sprox/svd.hpp"

namespace sprox {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Block like(const Block& shape_of, Eigen::MatrixXd values) {
  return shape_of.is_vector() ? Block::vector(std::move(values))
                              : Block::matrix(std::move(values));
}

// Radial map x -> f(||x||) x / ||x|| with 0 -> 0.
template <typename F>
Block radial(const Block& x, F f) {
  const double r = x.frobenius();
  if (r == 0.0) return Block::zeros(x.shape());
  return like(x, (f(r) / r) * x.values());
}

template <typename F>
Block spectral(const Block& x, F f) {
  const SvdResult svd = full_svd(x.values());
  Eigen::VectorXd mapped = svd.sigma.unaryExpr(f);
  return Block::matrix(compose_svd(svd.U, mapped, svd.V));
}

}  // namespace

std::string to_string(Structure s) {
  switch (s) {
    case Structure::Iso: return "iso";
    case Structure::Aniso: return "aniso";
    case Structure::SpectralIso: return "spectral_iso";
    case Structure::SpectralAniso: return "spectral_aniso";
  }
  return "unknown";
}

bool is_spectral(Structure s) {
  return s == Structure::SpectralIso || s == Structure::SpectralAniso;
}

ReferenceFn::ReferenceFn(std::vector<BlockShape> shapes,
                         std::vector<BlockRef> blocks)
    : shapes_(std::move(shapes)), blocks_(std::move(blocks)) {
  if (shapes_.size() != blocks_.size()) {
    throw InvalidConfig("reference: one block reference per block required");
  }
  for (std::size_t i = 0; i < shapes_.size(); ++i) {
    const bool matrix = shapes_[i].kind == BlockKind::Matrix;
    if (matrix != is_spectral(blocks_[i].structure)) {
      throw InvalidConfig("reference: structure " +
                          to_string(blocks_[i].structure) +
                          " does not fit block " + shapes_[i].to_string());
    }
  }
}

ReferenceFn ReferenceFn::uniform(const std::vector<BlockShape>& shapes,
                                 const ScalarRef& scalar,
                                 Structure vector_structure,
                                 Structure matrix_structure) {
  std::vector<BlockRef> blocks;
  for (const auto& s : shapes) {
    blocks.push_back({s.kind == BlockKind::Vector ? vector_structure
                                                  : matrix_structure,
                      scalar});
  }
  return ReferenceFn(shapes, std::move(blocks));
}

double ReferenceFn::block_radius(std::size_t i) const {
  switch (blocks_[i].structure) {
    case Structure::Iso:
    case Structure::SpectralIso:
      return 1.0;
    case Structure::Aniso:
      return std::sqrt(static_cast<double>(shapes_[i].size()));
    case Structure::SpectralAniso:
      return std::sqrt(static_cast<double>(std::min(shapes_[i].rows,
                                                    shapes_[i].cols)));
  }
  return 0.0;
}

double ReferenceFn::domain_radius() const {
  double s = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const double r = block_radius(i);
    s += r * r;
  }
  return std::sqrt(s);
}

double ReferenceFn::mu() const {
  double m = kInf;
  for (const auto& b : blocks_) m = std::min(m, b.scalar.mu());
  return m;
}

void ReferenceFn::require_matches(const ParamVec& x) const {
  if (x.num_blocks() != shapes_.size()) {
    throw ConformabilityError("reference: block count mismatch");
  }
  for (std::size_t i = 0; i < shapes_.size(); ++i) {
    if (x[i].shape() != shapes_[i]) {
      throw ConformabilityError("reference: block " + std::to_string(i) +
                                " has shape " + x[i].shape().to_string() +
                                ", expected " + shapes_[i].to_string());
    }
  }
}

Block precondition_block(const BlockRef& ref, const Block& d) {
  const ScalarRef& h = ref.scalar;
  switch (ref.structure) {
    case Structure::Aniso:
      return like(d, d.values().unaryExpr([&](double s) { return h.h_star_prime(s); }));
    case Structure::Iso:
    case Structure::SpectralIso:
      return radial(d, [&](double r) { return h.h_star_prime(r); });
    case Structure::SpectralAniso:
      return spectral(d, [&](double s) { return h.h_star_prime(s); });
  }
  throw InvalidConfig("unknown structure");
}

double phi_block(const BlockRef& ref, const Block& x) {
  const ScalarRef& h = ref.scalar;
  switch (ref.structure) {
    case Structure::Aniso: {
      double s = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        s += h.h(x.flat()(i));
        if (std::isinf(s)) return kInf;
      }
      return s;
    }
    case Structure::Iso:
    case Structure::SpectralIso:
      return h.h(x.frobenius());
    case Structure::SpectralAniso: {
      const Eigen::VectorXd sigma = singular_values(x.values());
      double s = 0.0;
      for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        s += h.h(sigma(i));
        if (std::isinf(s)) return kInf;
      }
      return s;
    }
  }
  throw InvalidConfig("unknown structure");
}

double phi_star_block(const BlockRef& ref, const Block& y) {
  const ScalarRef& h = ref.scalar;
  switch (ref.structure) {
    case Structure::Aniso: {
      double s = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) s += h.h_star(y.flat()(i));
      return s;
    }
    case Structure::Iso:
    case Structure::SpectralIso:
      return h.h_star(y.frobenius());
    case Structure::SpectralAniso: {
      const Eigen::VectorXd sigma = singular_values(y.values());
      double s = 0.0;
      for (Eigen::Index i = 0; i < sigma.size(); ++i) s += h.h_star(sigma(i));
      return s;
    }
  }
  throw InvalidConfig("unknown structure");
}

Block grad_phi_block(const BlockRef& ref, const Block& x) {
  const ScalarRef& h = ref.scalar;
  switch (ref.structure) {
    case Structure::Aniso:
      return like(x, x.values().unaryExpr([&](double t) { return h.h_prime(t); }));
    case Structure::Iso:
    case Structure::SpectralIso:
      return radial(x, [&](double r) { return h.h_prime(r); });
    case Structure::SpectralAniso:
      return spectral(x, [&](double s) { return h.h_prime(s); });
  }
  throw InvalidConfig("unknown structure");
}

Block clamp_to_interior(const BlockRef& ref, const Block& x, double margin,
                        double slack) {
  const double limit = 1.0 - margin;
  auto clamp_scalar = [&](double t) {
    const double a = std::abs(t);
    if (a > 1.0 + slack) {
      throw BoundaryError("point lies outside the reference domain");
    }
    return a > limit ? std::copysign(limit, t) : t;
  };
  switch (ref.structure) {
    case Structure::Aniso:
      return like(x, x.values().unaryExpr(clamp_scalar));
    case Structure::Iso:
    case Structure::SpectralIso: {
      const double r = x.frobenius();
      const double c = clamp_scalar(r);
      if (c == r) return x;
      return like(x, (c / r) * x.values());
    }
    case Structure::SpectralAniso: {
      const SvdResult svd = full_svd(x.values());
      if (svd.sigma.size() == 0 || svd.sigma(0) <= limit) {
        if (svd.sigma.size() > 0 && svd.sigma(0) > 1.0 + slack) {
          throw BoundaryError("point lies outside the reference domain");
        }
        return x;
      }
      Eigen::VectorXd s = svd.sigma.unaryExpr(clamp_scalar);
      return Block::matrix(compose_svd(svd.U, s, svd.V));
    }
  }
  throw InvalidConfig("unknown structure");
}

ParamVec precondition(const ReferenceFn& ref, const ParamVec& d) {
  ref.require_matches(d);
  std::vector<Block> out;
  out.reserve(d.num_blocks());
  for (std::size_t i = 0; i < d.num_blocks(); ++i) {
    out.push_back(precondition_block(ref.block(i), d[i]));
  }
  return ParamVec(std::move(out));
}

double phi(const ReferenceFn& ref, const ParamVec& x) {
  ref.require_matches(x);
  double s = 0.0;
  for (std::size_t i = 0; i < x.num_blocks(); ++i) {
    s += phi_block(ref.block(i), x[i]);
    if (std::isinf(s)) return kInf;
  }
  return s;
}

double phi_star(const ReferenceFn& ref, const ParamVec& y) {
  ref.require_matches(y);
  double s = 0.0;
  for (std::size_t i = 0; i < y.num_blocks(); ++i) {
    s += phi_star_block(ref.block(i), y[i]);
  }
  return s;
}

ParamVec grad_phi(const ReferenceFn& ref, const ParamVec& x) {
  ref.require_matches(x);
  std::vector<Block> out;
  out.reserve(x.num_blocks());
  for (std::size_t i = 0; i < x.num_blocks(); ++i) {
    out.push_back(grad_phi_block(ref.block(i), x[i]));
  }
  return ParamVec(std::move(out));
}

double bregman_dual(const ReferenceFn& ref, const ParamVec& a, const ParamVec& b) {
  require_conformable(a, b);
  const double v = phi_star(ref, a) - phi_star(ref, b) -
                   dot(precondition(ref, b), a - b);
  return std::max(0.0, v);
}

double episcaled_phi_block(const BlockRef& ref, double gamma, const Block& z) {
  return gamma * phi_block(ref, (1.0 / gamma) * z);
}

double episcaled_phi(const ReferenceFn& ref, double gamma, const ParamVec& z) {
  return gamma * phi(ref, scale(1.0 / gamma, z));
}

}  // namespace sprox
