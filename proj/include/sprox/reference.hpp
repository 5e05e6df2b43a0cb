#pragma once

// Reference functions phi on a product space and their conjugate calculus.
//
// Each block carries a structure tag and a scalar kernel h:
//   Aniso          phi(x) = sum_i h(x_i)               (vector blocks)
//   Iso            phi(x) = h(||x||)                   (vector blocks)
//   SpectralAniso  phi(X) = sum_i h(sigma_i(X))        (matrix blocks)
//   SpectralIso    phi(X) = h(||X||_F)                 (matrix blocks)
// The product-space function is the sum over blocks, so every operation
// below acts blockwise.

#include <string>
#include <vector>

#include "sprox/scalar_ref.hpp"
#include "sprox/tensor.hpp"

namespace sprox {

enum class Structure { Iso, Aniso, SpectralIso, SpectralAniso };

std::string to_string(Structure s);
bool is_spectral(Structure s);

struct BlockRef {
  Structure structure;
  ScalarRef scalar;
};

class ReferenceFn {
 public:
  // Validates that spectral structures sit on matrix blocks and the plain
  // ones on vector blocks.
  ReferenceFn(std::vector<BlockShape> shapes, std::vector<BlockRef> blocks);

  // Same kernel everywhere; vector blocks get `vector_structure`, matrix
  // blocks `matrix_structure`.
  static ReferenceFn uniform(const std::vector<BlockShape>& shapes,
                             const ScalarRef& scalar,
                             Structure vector_structure = Structure::Aniso,
                             Structure matrix_structure = Structure::SpectralAniso);

  std::size_t num_blocks() const { return blocks_.size(); }
  const BlockRef& block(std::size_t i) const { return blocks_[i]; }
  const BlockShape& shape(std::size_t i) const { return shapes_[i]; }
  const std::vector<BlockShape>& shapes() const { return shapes_; }

  // sup of the block norm over dom phi_i.
  double block_radius(std::size_t i) const;
  // sup of the product-space norm over dom phi.
  double domain_radius() const;
  // Smallest strong convexity modulus over blocks.
  double mu() const;

  void require_matches(const ParamVec& x) const;

 private:
  std::vector<BlockShape> shapes_;
  std::vector<BlockRef> blocks_;
};

// Block-level operations.
Block precondition_block(const BlockRef& ref, const Block& d);
double phi_block(const BlockRef& ref, const Block& x);
double phi_star_block(const BlockRef& ref, const Block& y);
Block grad_phi_block(const BlockRef& ref, const Block& x);
// Pulls a point that sits on or numerically just past the boundary of
// dom phi back to norm 1 - margin (per coordinate, norm or singular value,
// depending on structure). Points more than `slack` beyond the boundary
// raise BoundaryError.
Block clamp_to_interior(const BlockRef& ref, const Block& x,
                        double margin = ScalarRef::kBoundaryMargin,
                        double slack = 1e-9);

// grad phi*(d): the nonlinear preconditioner of the forward step.
ParamVec precondition(const ReferenceFn& ref, const ParamVec& d);
// +infinity outside dom phi.
double phi(const ReferenceFn& ref, const ParamVec& x);
double phi_star(const ReferenceFn& ref, const ParamVec& y);
// Inverse of precondition on int dom phi; BoundaryError within the margin.
ParamVec grad_phi(const ReferenceFn& ref, const ParamVec& x);
// phi*(a) - phi*(b) - <grad phi*(b), a - b>, clipped at zero.
double bregman_dual(const ReferenceFn& ref, const ParamVec& a, const ParamVec& b);

// Episcaled reference (gamma * phi)(z / gamma).
double episcaled_phi(const ReferenceFn& ref, double gamma, const ParamVec& z);
double episcaled_phi_block(const BlockRef& ref, double gamma, const Block& z);

}  // namespace sprox
