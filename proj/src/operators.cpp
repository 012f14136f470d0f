#include "curvlab/operators.hpp"

#include <cmath>

#include "curvlab/errors.hpp"

namespace curvlab {

namespace {

void check_shapes(const GeneralRadialMetric& g, const RadialPerturbation& h) {
  if (h.a.size() != g.grid.size() || h.b.size() != g.grid.size())
    throw CurvError(ErrorKind::GridMismatch, "perturbation does not live on the metric's grid");
}

double sup(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// mean curvature factor m = (n-1) phi_s / phi and its arclength derivative
struct MeanFactor {
  Vec m, ms;
};

MeanFactor mean_factor(const RadialGeometry& geo) {
  const int n = geo.n;
  MeanFactor f;
  Vec q = geo.phi_s.cwiseQuotient(geo.phi);
  f.m = (n - 1) * q;
  f.ms = (n - 1) * (geo.phi_ss.cwiseQuotient(geo.phi) - q.cwiseProduct(q));
  return f;
}

}  // namespace

GeneralRadialMetric perturbed(const GeneralRadialMetric& g, const RadialPerturbation& h, double t) {
  check_shapes(g, h);
  GeneralRadialMetric p = g;
  p.A = g.A.cwiseProduct((Vec::Ones(g.A.size()) + t * h.a));
  p.B = g.B.cwiseProduct((Vec::Ones(g.B.size()) + t * h.b));
  p.exact.reset();
  if (p.A.minCoeff() <= 0.0 || p.B.minCoeff() <= 0.0)
    throw CurvError(ErrorKind::Domain, "g + t h is not positive definite", t);
  return p;
}

Linearization linearize_closed(const GeneralRadialMetric& g, const RadialPerturbation& h) {
  check_shapes(g, h);
  RadialGeometry geo = radial_geometry(g);
  const int n = g.n;
  MeanFactor mf = mean_factor(geo);
  Vec as = geo.ds(h.a, 1);
  Vec bs = geo.ds(h.b, 1);
  Vec bss = geo.dss(h.b, 1);
  Vec f = h.a - h.b;
  Linearization out;
  out.dR = mf.m.cwiseProduct(as) - (n - 1) * bss - n * mf.m.cwiseProduct(bs) +
           (mf.ms + mf.m.cwiseProduct(mf.m)).cwiseProduct(f) - h.a.cwiseProduct(geo.ric_rad) -
           (n - 1) * h.b.cwiseProduct(geo.ric_tan);
  for (const auto& bd : boundary_data(geo)) {
    // h(., nu) has no tangential part, so X = 0 and its divergence drops out
    const double divX = 0.0;
    double dnub = bd.sign * bs(bd.index);
    double v = 0.5 * ((n - 1) * dnub - bd.H * h.a(bd.index) - divX);
    out.dH.push_back({bd.index, bd.sign, v});
    out.div_X.push_back(divX);
  }
  return out;
}

Linearization linearize_fd(const GeneralRadialMetric& g, const RadialPerturbation& h) {
  check_shapes(g, h);
  auto central = [&](double t) {
    CurvatureReport p = curvature_report(perturbed(g, h, t));
    CurvatureReport m = curvature_report(perturbed(g, h, -t));
    Linearization d;
    d.dR = (p.scal - m.scal) / (2.0 * t);
    for (size_t k = 0; k < p.boundaries.size(); ++k) {
      const auto& bp = p.boundaries[k];
      d.dH.push_back({bp.index, bp.sign, (bp.H - m.boundaries[k].H) / (2.0 * t)});
      d.div_X.push_back(0.0);
    }
    return d;
  };
  Linearization d1 = central(1e-3), d2 = central(5e-4);
  Linearization out = d2;
  out.dR = (4.0 * d2.dR - d1.dR) / 3.0;
  for (size_t k = 0; k < out.dH.size(); ++k) out.dH[k].value = (4.0 * d2.dH[k].value - d1.dH[k].value) / 3.0;
  return out;
}

Linearization linearize_curvatures(const GeneralRadialMetric& g, const RadialPerturbation& h, double tol) {
  Linearization c = linearize_closed(g, h);
  Linearization f = linearize_fd(g, h);
  double gap = sup(c.dR - f.dR) / (1.0 + sup(c.dR));
  for (size_t k = 0; k < c.dH.size(); ++k)
    gap = std::max(gap, std::abs(c.dH[k].value - f.dH[k].value) / (1.0 + std::abs(c.dH[k].value)));
  c.fd_gap = gap;
  if (gap > tol)
    throw CurvError(ErrorKind::InternalConsistency,
                    "closed-form and finite-difference linearizations disagree by " + std::to_string(gap), gap);
  return c;
}

Adjoints adjoints(const RadialGeometry& geo, const PotentialTriple& p) {
  if (p.V.size() != geo.grid->size())
    throw CurvError(ErrorKind::GridMismatch, "potential does not live on the metric's grid");
  const int n = geo.n;
  Vec Vs = p.Vs.size() ? p.Vs : geo.ds(p.V, 1);
  Vec Vss = p.Vss.size() ? p.Vss : geo.dss(p.V, 1);
  Vec q = geo.phi_s.cwiseQuotient(geo.phi);
  Vec lap = Vss + (n - 1) * q.cwiseProduct(Vs);
  Adjoints out;
  out.rad = -lap + Vss - p.V.cwiseProduct(geo.ric_rad);
  out.tan = -lap + q.cwiseProduct(Vs) - p.V.cwiseProduct(geo.ric_tan);
  for (const auto& bd : boundary_data(geo)) {
    double dnu = bd.sign * Vs(bd.index);
    out.bnd.push_back({bd.index, bd.sign, dnu - p.V(bd.index) * bd.pi0});
  }
  return out;
}

Adjoints adjoints(const GeneralRadialMetric& g, const PotentialTriple& p) {
  RadialGeometry geo = radial_geometry(g);
  return adjoints(geo, p);
}

double pair_interior(const RadialGeometry& geo, const Vec& a1, const Vec& b1, const Vec& a2, const Vec& b2) {
  Vec f = a1.cwiseProduct(a2) + (geo.n - 1) * b1.cwiseProduct(b2);
  return geo.integrate(f, 1);
}

GreenTerms green_identity(const GeneralRadialMetric& g, const RadialPerturbation& h, const PotentialTriple& p) {
  RadialGeometry geo = radial_geometry(g);
  Linearization lin = linearize_closed(g, h);
  Adjoints adj = adjoints(geo, p);
  auto bds = boundary_data(geo);
  const int n = g.n;
  GreenTerms t;
  t.dR_V = geo.integrate(lin.dR.cwiseProduct(p.V), 1);
  t.AV_h = pair_interior(geo, adj.rad, adj.tan, h.a, h.b);
  for (size_t k = 0; k < bds.size(); ++k) {
    const auto& bd = bds[k];
    t.dH_V += 2.0 * lin.dH[k].value * p.V(bd.index) * bd.area;
    t.BV_h += (n - 1) * adj.bnd[k].value * h.b(bd.index) * bd.area;
  }
  t.residual = std::abs(t.dR_V + t.dH_V - t.AV_h - t.BV_h);
  double scale = std::max({std::abs(t.dR_V), std::abs(t.dH_V), std::abs(t.AV_h), std::abs(t.BV_h)});
  t.relative = scale > 0.0 ? t.residual / scale : t.residual;
  return t;
}

double green_identity_residual(const GeneralRadialMetric& g, const RadialPerturbation& h, const PotentialTriple& p) {
  return green_identity(g, h, p).residual;
}

OperatorResidual vstatic_residual(const GeneralRadialMetric& g, const PotentialTriple& p) {
  RadialGeometry geo = radial_geometry(g);
  Adjoints adj = adjoints(geo, p);
  const int n = g.n;
  OperatorResidual r;
  r.weak_potential = p.trivial();
  r.rad = adj.rad.array() - p.kappa;
  r.tan = adj.tan.array() - p.kappa;
  r.interior = std::max(sup(r.rad), sup(r.tan));
  Vec Vs = p.Vs.size() ? p.Vs : geo.ds(p.V, 1);
  Vec Vss = p.Vss.size() ? p.Vss : geo.dss(p.V, 1);
  Vec lap = Vss + (n - 1) * geo.phi_s.cwiseQuotient(geo.phi).cwiseProduct(Vs);
  Vec tr = lap + geo.scal.cwiseProduct(p.V) / (n - 1.0);
  tr.array() += p.kappa * n / (n - 1.0);
  r.trace_interior = sup(tr);
  auto bds = boundary_data(geo);
  for (size_t k = 0; k < bds.size(); ++k) {
    double v = adj.bnd[k].value - p.tau;
    r.bnd.push_back(v);
    r.boundary = std::max(r.boundary, std::abs(v));
    const auto& bd = bds[k];
    double tb = bd.sign * Vs(bd.index) - bd.H * p.V(bd.index) / (n - 1.0) - p.tau;
    r.trace_boundary = std::max(r.trace_boundary, std::abs(tb));
  }
  return r;
}

namespace {
// F with the measures of the base metric geo0 frozen; Vol and Area are those of g
double functional_frozen(const RadialGeometry& geo0, const GeneralRadialMetric& g, const PotentialTriple& p) {
  CurvatureReport rep = curvature_report(g);
  auto b0 = boundary_data(geo0);
  double F = geo0.integrate(rep.scal.cwiseProduct(p.V), 1);
  for (size_t k = 0; k < b0.size(); ++k) F += 2.0 * rep.boundaries[k].H * p.V(b0[k].index) * b0[k].area;
  F -= 2.0 * p.kappa * rep.volume + 2.0 * p.tau * rep.area;
  return F;
}
}  // namespace

FunctionalProbe weighted_functional(const GeneralRadialMetric& g, const PotentialTriple& p,
                                    const RadialPerturbation* h) {
  RadialGeometry geo = radial_geometry(g);
  FunctionalProbe out;
  out.value = functional_frozen(geo, g, p);
  if (h) {
    auto central = [&](double t) {
      return (functional_frozen(geo, perturbed(g, *h, t), p) - functional_frozen(geo, perturbed(g, *h, -t), p)) /
             (2.0 * t);
    };
    out.derivative = (4.0 * central(5e-4) - central(1e-3)) / 3.0;
  }
  return out;
}

}  // namespace curvlab
