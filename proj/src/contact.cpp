#include "foliation/contact.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace foliation {

ScalarField pair_form(const OneForm& omega, const VectorField& V) {
  auto make = [](const auto& om, const auto& vf) {
    return [om, vf](const auto& xs, int dim) {
      auto w = om(xs, dim);
      auto v = vf(xs, dim);
      auto s = w[0] * v[0];
      for (int i = 1; i < dim; ++i) s = s + w[i] * v[i];
      return s;
    };
  };
  return {make(omega.re, V.re), make(omega.du, V.du)};
}

FrameDecomposition frame_decompose(const ContactStructure& cs, const ChartPoint& p,
                                   const std::array<double, kMaxDim>& v) {
  const int dim = p.dim;
  const auto x1 = eval_vector(cs.X1, p);
  const auto x2 = eval_vector(cs.X2, p);
  const auto x0 = eval_vector(cs.X0, p);
  Eigen::MatrixXd A(dim, 3);
  Eigen::VectorXd b(dim);
  for (int i = 0; i < dim; ++i) {
    A(i, 0) = x1[i];
    A(i, 1) = x2[i];
    A(i, 2) = x0[i];
    b(i) = v[i];
  }
  FrameDecomposition out;
  if (dim == 3) {
    const double det = A.determinant();
    if (std::abs(det) < kFrameSingularTol) return out;
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    if (svd.singularValues()(2) < kFrameSingularTol) return out;
  }
  const Eigen::Vector3d d = A.colPivHouseholderQr().solve(b);
  out.ok = true;
  out.c.d1 = d(0);
  out.c.d2 = d(1);
  out.c.d0 = d(2);
  out.c.residual = (A * d - b).norm();
  return out;
}

std::optional<StructureFunctions> structure_functions(const ContactStructure& cs,
                                                      const ChartPoint& p) {
  const auto b12 = lie_bracket_value(cs.X1, cs.X2, p);
  const auto b01 = lie_bracket_value(cs.X0, cs.X1, p);
  const auto b02 = lie_bracket_value(cs.X0, cs.X2, p);
  const auto d12 = frame_decompose(cs, p, b12);
  const auto d01 = frame_decompose(cs, p, b01);
  const auto d02 = frame_decompose(cs, p, b02);
  if (!d12.ok || !d01.ok || !d02.ok) return std::nullopt;
  StructureFunctions sf;
  sf.c121 = d12.c.d1; sf.c122 = d12.c.d2; sf.c120 = d12.c.d0;
  sf.c011 = d01.c.d1; sf.c012 = d01.c.d2; sf.c010 = d01.c.d0;
  sf.c021 = d02.c.d1; sf.c022 = d02.c.d2; sf.c020 = d02.c.d0;
  sf.max_residual = std::max({d12.c.residual, d01.c.residual, d02.c.residual});
  return sf;
}

namespace {

void record(ContactCheck& chk, const std::string& what, double err, double tol) {
  chk.max_violation = std::max(chk.max_violation, err);
  if (err > tol) chk.failures.push_back(what + " violation " + std::to_string(err));
}

}  // namespace

ContactCheck validate_contact(const ContactStructure& cs,
                              const std::vector<ChartPoint>& pts, double tol) {
  ContactCheck chk;
  for (const auto& p : pts) {
    const auto sf = structure_functions(cs, p);
    if (!sf) {
      chk.failures.push_back("frame singular at a sample point");
      continue;
    }
    record(chk, "[X1,X2] X0-component", std::abs(sf->c120 - 1.0), tol);
    record(chk, "[X0,X1] X0-component", std::abs(sf->c010), tol);
    record(chk, "[X0,X2] X0-component", std::abs(sf->c020), tol);
    record(chk, "frame decomposition residual", sf->max_residual, tol);

    if (p.dim == 4) {
      const auto gc = chart_constraint_grad(p.chart, p.x);
      for (const VectorField* X : {&cs.X1, &cs.X2, &cs.X0}) {
        const auto v = eval_vector(*X, p);
        double dot = 0.0;
        for (int i = 0; i < 4; ++i) dot += gc[i] * v[i];
        record(chk, X->label + " tangency", std::abs(dot), tol);
      }
    }

    if (cs.omega) {
      const double w0 = eval_value(pair_form(*cs.omega, cs.X0), p);
      const double w1 = eval_value(pair_form(*cs.omega, cs.X1), p);
      const double w2 = eval_value(pair_form(*cs.omega, cs.X2), p);
      record(chk, "omega(X0)=1", std::abs(w0 - 1.0), tol);
      record(chk, "omega(X1)=0", std::abs(w1), tol);
      record(chk, "omega(X2)=0", std::abs(w2), tol);

      const double wb = eval_value(pair_form(*cs.omega, lie_bracket(cs.X1, cs.X2)), p);
      record(chk, "omega([X1,X2])=1", std::abs(wb - 1.0), tol);

      // d omega(X0, Xi) = X0(omega(Xi)) - Xi(omega(X0)) - omega([X0,Xi]).
      for (const VectorField* X : {&cs.X1, &cs.X2}) {
        const double t1 = apply_field_value(cs.X0, pair_form(*cs.omega, *X), p);
        const double t2 = apply_field_value(*X, pair_form(*cs.omega, cs.X0), p);
        const double t3 = eval_value(pair_form(*cs.omega, lie_bracket(cs.X0, *X)), p);
        record(chk, "d omega(X0," + X->label + ")=0", std::abs(t1 - t2 - t3), tol);
      }
    }
  }
  chk.ok = chk.failures.empty();
  return chk;
}

double g_horizontal(const FrameCoeffs& a, const FrameCoeffs& b) {
  return a.d1 * b.d1 + a.d2 * b.d2;
}

}  // namespace foliation
