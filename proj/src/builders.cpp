#include "cfl/builders.hpp"

#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "cfl/specfun.hpp"
#include "cfl/util.hpp"

namespace cfl::builders {

void SampledSystem::validate() const {
  double sum = 0.0;
  for (const auto& s : samples) {
    if (s.weight < 0) throw std::runtime_error("SampledSystem: negative weight");
    sum += s.weight;
  }
  if (std::abs(sum - total_measure) > 1e-9 * std::max(1.0, total_measure))
    throw std::runtime_error("SampledSystem: weights do not sum to the declared total measure");
  if (!matrix_backed() && !provider)
    throw std::runtime_error("SampledSystem: provider-backed system without provider");
}

namespace {

using Eigen::Vector3d;

struct IcoMesh {
  std::vector<Vector3d> verts;
  std::vector<std::array<int, 3>> tris;
};

IcoMesh icosahedron() {
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Vector3d> v = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> t = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
      {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
      {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  return {v, t};
}

IcoMesh subdivide(const IcoMesh& in) {
  IcoMesh out;
  out.verts = in.verts;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vector3d m = (out.verts[a] + out.verts[b]).normalized();
    out.verts.push_back(m);
    int idx = (int)out.verts.size() - 1;
    midpoint[key] = idx;
    return idx;
  };
  for (const auto& t : in.tris) {
    int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
    out.tris.push_back({t[0], ab, ca});
    out.tris.push_back({t[1], bc, ab});
    out.tris.push_back({t[2], ca, bc});
    out.tris.push_back({ab, bc, ca});
  }
  return out;
}

double spherical_triangle_area(const Vector3d& a, const Vector3d& b, const Vector3d& c) {
  double num = std::abs(a.dot(b.cross(c)));
  double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

// Vertex weights = adjacent spherical triangle areas / 3; sums to 4 pi.
std::vector<double> vertex_weights(const IcoMesh& m) {
  std::vector<double> w(m.verts.size(), 0.0);
  for (const auto& t : m.tris) {
    double a = spherical_triangle_area(m.verts[t[0]], m.verts[t[1]], m.verts[t[2]]) / 3.0;
    w[t[0]] += a;
    w[t[1]] += a;
    w[t[2]] += a;
  }
  return w;
}

Mat2 pauli_dot(const Vector3d& p) {
  return p(0) * mats::sigma1() + p(1) * mats::sigma2() + p(2) * mats::sigma3();
}

void push_sphere_points(SampledSystem& sys, const IcoMesh& mesh, const std::vector<double>& w,
                        double tau, double chiral_shift, double tag) {
  for (size_t i = 0; i < mesh.verts.size(); ++i) {
    Mat2 f = tau * pauli_dot(mesh.verts[i]) + Mat2::Identity() + chiral_shift * mats::sigma3();
    Sample s;
    s.coords.resize(4);
    s.coords << mesh.verts[i](0), mesh.verts[i](1), mesh.verts[i](2), tag;
    s.weight = w[i];
    s.point = std::make_shared<opcore::FermionPoint>(Matrix(f));
    sys.samples.push_back(std::move(s));
    sys.total_measure += w[i];
  }
}

}  // namespace

SampledSystem build_dirac_sphere(const SphereParams& params) {
  IcoMesh mesh = icosahedron();
  for (int i = 0; i < params.subdivisions; ++i) mesh = subdivide(mesh);
  if (mesh.verts.empty()) throw std::runtime_error("build_dirac_sphere: empty mesh");
  auto w = vertex_weights(mesh);

  SampledSystem sys;
  sys.hilbert = HilbertModel(2);
  sys.signature = SpinSignature(1, 1);
  switch (params.kind) {
    case SphereKind::Single:
      push_sphere_points(sys, mesh, w, 2.0, 0.0, 0.0);
      break;
    case SphereKind::Disjoint:
      if (params.tau_plus <= 1.0 || params.tau_minus <= 1.0)
        throw std::invalid_argument("build_dirac_sphere: disjoint kind needs tau > 1");
      push_sphere_points(sys, mesh, w, params.tau_plus, 0.0, +1.0);
      push_sphere_points(sys, mesh, w, params.tau_minus, 0.0, -1.0);
      break;
    case SphereKind::Intersecting:
      push_sphere_points(sys, mesh, w, 2.0, +1.0, +1.0);
      push_sphere_points(sys, mesh, w, 2.0, -1.0, -1.0);
      break;
  }
  sys.spin.reserve(sys.samples.size());
  for (const auto& s : sys.samples) sys.spin.push_back(opcore::spin_space(s.point));
  sys.validate();
  return sys;
}

SampledSystem build_torus_scalar(double cutoff, int grid_n) {
  if (grid_n < 1) throw std::invalid_argument("build_torus_scalar: grid_n >= 1");
  std::vector<Eigen::Vector2i> modes;
  int kmax = (int)std::floor(std::sqrt(std::max(0.0, cutoff)));
  for (int k1 = -kmax; k1 <= kmax; ++k1)
    for (int k2 = -kmax; k2 <= kmax; ++k2)
      if (k1 * k1 + k2 * k2 <= cutoff) modes.push_back({k1, k2});
  const int n = (int)modes.size();

  SampledSystem sys;
  sys.hilbert = HilbertModel(n);
  sys.signature = SpinSignature(0, 1);
  const double two_pi = 2.0 * M_PI;
  const double cellw = (two_pi / grid_n) * (two_pi / grid_n);
  const double inv4pi2 = 1.0 / (two_pi * two_pi);
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      double x = i * two_pi / grid_n, y = j * two_pi / grid_n;
      Matrix f(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          double phase = (modes[b](0) - modes[a](0)) * x + (modes[b](1) - modes[a](1)) * y;
          f(a, b) = -inv4pi2 * std::exp(cplx(0, phase));
        }
      Sample s;
      s.coords.resize(2);
      s.coords << x, y;
      s.weight = cellw;
      s.point = std::make_shared<opcore::FermionPoint>(std::move(f));
      sys.samples.push_back(std::move(s));
      sys.total_measure += cellw;
    }
  }
  sys.spin.reserve(sys.samples.size());
  for (const auto& s : sys.samples) sys.spin.push_back(opcore::spin_space(s.point));
  sys.validate();
  return sys;
}

Matrix plane_discrete_F(double mass, int m_nodes, const Eigen::Vector2d& z) {
  if (m_nodes < 2) throw std::invalid_argument("plane_discrete_F: m_nodes >= 2");
  Matrix f(m_nodes, m_nodes);
  for (int i = 0; i < m_nodes; ++i) {
    double ti = 2.0 * M_PI * i / m_nodes;
    Eigen::Vector2d ki(std::cos(ti), std::sin(ti));
    for (int j = 0; j < m_nodes; ++j) {
      double tj = 2.0 * M_PI * j / m_nodes;
      Eigen::Vector2d kj(std::cos(tj), std::sin(tj));
      double ph = mass * (ki - kj).dot(z);
      f(i, j) = -(1.0 / m_nodes) * std::exp(cplx(0, ph)) * (1.0 + std::exp(cplx(0, tj - ti)));
    }
  }
  return f;
}

Mat2 eval_plane_kernel(double mass, const Eigen::Vector2d& zp, const Eigen::Vector2d& z) {
  Eigen::Vector2d xi = zp - z;
  double r = xi.norm();
  if (mass * r < 1e-14) {
    // J1(s)/s -> 1/2; the xi factor kills the first term
    return -Mat2::Identity();
  }
  Mat2 xs = xi(0) * mats::sigma1() + xi(1) * mats::sigma2();
  double j1_over = specfun::bessel_j1(mass * r) / (mass * r);
  return cplx(0, 1) * mass * j1_over * xs - specfun::bessel_j0(mass * r) * Mat2::Identity();
}

namespace {

class PlaneProvider : public KernelProvider {
 public:
  explicit PlaneProvider(double m) : m_(m) {}
  Mat2 eval_P(const Eigen::Vector2d& zp, const Eigen::Vector2d& z) const override {
    return eval_plane_kernel(m_, zp, z);
  }
  Eigen::Vector2d eval_nu() const override { return {-1.0, -1.0}; }
  Mat2 fibre_gram() const override { return Mat2::Identity(); }
  bool riemannian() const override { return true; }
  double mass() const override { return m_; }

 private:
  double m_;
};

class ChiralProvider : public KernelProvider {
 public:
  ChiralProvider(double m, double tau) : m_(m), tau_(tau) {
    if (std::abs(std::abs(tau) - 1.0) < 1e-12)
      throw std::invalid_argument("ChiralProvider: tau = +-1 degenerates the spin spaces");
  }
  Mat2 eval_P(const Eigen::Vector2d& zp, const Eigen::Vector2d& z) const override {
    Mat2 g = Mat2::Identity() + tau_ * mats::sigma3();
    return g * eval_plane_kernel(m_, zp, z) * g;
  }
  Eigen::Vector2d eval_nu() const override {
    double n1 = -(1.0 + tau_) * (1.0 + tau_), n2 = -(1.0 - tau_) * (1.0 - tau_);
    return {std::min(n1, n2), std::max(n1, n2)};
  }
  Mat2 fibre_gram() const override { return Mat2::Identity(); }
  bool riemannian() const override { return true; }
  double mass() const override { return m_; }
  double tau() const { return tau_; }

 private:
  double m_, tau_;
};

// Gauss-Legendre nodes by Newton iteration on Legendre polynomials.
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
      double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        double dt = p1 / dp;
        t -= dt;
        if (std::abs(dt) < 1e-16) break;
      }
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      x[i] = t;
      w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
  }
};

const GaussLegendre& gl24() {
  static GaussLegendre g(24);
  return g;
}

}  // namespace

std::shared_ptr<KernelProvider> make_plane_provider(double mass) {
  return std::make_shared<PlaneProvider>(mass);
}

std::shared_ptr<KernelProvider> make_chiral_provider(double mass, double tau) {
  return std::make_shared<ChiralProvider>(mass, tau);
}

MinkowskiProvider::MinkowskiProvider(const MinkowskiParams& p) : par_(p) {
  if (p.epsilon <= 0.0) throw std::invalid_argument("MinkowskiProvider: epsilon > 0 required (kernel divergent)");
  if (p.mass <= 0.0) throw std::invalid_argument("MinkowskiProvider: mass > 0 required");
  nu_ = eval_nu_quadrature();
  if (!(nu_(0) < 0.0 && nu_(1) > 0.0))
    throw std::runtime_error("MinkowskiProvider: expected nu1 < 0 < nu2");
}

std::shared_ptr<MinkowskiProvider> make_minkowski_provider(const MinkowskiParams& p) {
  return std::make_shared<MinkowskiProvider>(p);
}

Mat2 MinkowskiProvider::eval_P(const Eigen::Vector2d& zp, const Eigen::Vector2d& z) const {
  Eigen::Vector2d xi = zp - z;
  return par_.mode == MinkowskiMode::Quadrature ? eval_P_quadrature(xi) : eval_P_closed(xi);
}

Eigen::Vector2d MinkowskiProvider::eval_nu() const { return nu_; }

// Lower-mass-shell integral with damping e^{eps k0}; k0 = -sqrt(p^2+m^2).
Mat2 MinkowskiProvider::eval_P_quadrature(const Eigen::Vector2d& xi) const {
  const double m = par_.mass, eps = par_.epsilon;
  const double dt = xi(0), dx = xi(1);
  const double pmax = std::log(3.0 / (eps * par_.tail_tol)) / eps + m;
  const double width = std::min(2.0, 2.0 * M_PI / (4.0 * (std::abs(dt) + std::abs(dx)) + 0.5));
  const auto& gl = gl24();
  cplx c_id = 0, c_g0 = 0, c_g1 = 0;
  for (double a = 0.0; a < pmax; a += width) {
    double b = std::min(a + width, pmax);
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (size_t i = 0; i < gl.x.size(); ++i) {
      double p = mid + half * gl.x[i];
      double om = std::sqrt(p * p + m * m);
      cplx ph = std::exp(cplx(-eps * om, om * dt));
      double gw = gl.w[i] * half;
      c_id += gw * (m / om) * ph * std::cos(p * dx);
      c_g0 += gw * (-1.0) * ph * std::cos(p * dx);
      c_g1 += gw * (-p / om) * ph * cplx(0, 1) * std::sin(p * dx);
    }
  }
  const double norm = 1.0 / (4.0 * M_PI * M_PI);
  return norm * (c_id * Mat2::Identity() + c_g0 * mats::gamma0() + c_g1 * mats::gamma1());
}

Mat2 MinkowskiProvider::eval_P_closed(const Eigen::Vector2d& xi) const {
  const double m = par_.mass, eps = par_.epsilon;
  const double dt = xi(0), dx = xi(1);
  // w never touches the negative real axis, so the principal root is smooth;
  // continuity from xi = 0 fixes rho = i sqrt(w) with rho(0) = i eps.
  cplx w(dx * dx + eps * eps - dt * dt, -2.0 * eps * dt);
  cplx sw = std::sqrt(w);
  cplx rho = cplx(0, 1) * sw;
  cplx z = m * sw;
  cplx k0 = specfun::bessel_k0(z), k1 = specfun::bessel_k1(z);
  Mat2 mm;
  mm << cplx(dt, eps), -dx, dx, cplx(-dt, -eps);
  const double norm = m / (4.0 * M_PI * M_PI);
  return norm * (k0 * Mat2::Identity() - (k1 / rho) * mm);
}

Eigen::Vector2d MinkowskiProvider::eval_nu_quadrature() const {
  const double m = par_.mass, eps = par_.epsilon;
  // omega = m cosh(theta): nu_{1/2} = (m/4pi^2) int_0^inf e^{-eps m cosh} (1 -/+ cosh) dtheta
  double tmax = 2.0;
  while (std::exp(-eps * m * std::cosh(tmax)) * std::cosh(tmax) > 1e-19) tmax += 0.5;
  const auto& gl = gl24();
  double i0 = 0, i1 = 0;
  const double width = 0.25;
  for (double a = 0.0; a < tmax; a += width) {
    double b = std::min(a + width, tmax);
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (size_t i = 0; i < gl.x.size(); ++i) {
      double th = mid + half * gl.x[i];
      double damp = std::exp(-eps * m * std::cosh(th)) * gl.w[i] * half;
      i0 += damp;
      i1 += damp * std::cosh(th);
    }
  }
  const double norm = m / (4.0 * M_PI * M_PI);
  return {norm * (i0 - i1), norm * (i0 + i1)};
}

SampledSystem build_euclidean_plane(double mass, int m_nodes,
                                    const std::vector<Eigen::Vector2d>& coords) {
  if (m_nodes < 2) throw std::invalid_argument("build_euclidean_plane: m_nodes >= 2");
  SampledSystem sys;
  sys.hilbert = HilbertModel(m_nodes);
  sys.signature = SpinSignature(0, 2);
  sys.provider = make_plane_provider(mass);
  double w = coords.empty() ? 0.0 : 1.0 / (double)coords.size();
  for (const auto& z : coords) {
    Sample s;
    s.coords = z;
    s.weight = w;
    s.point = std::make_shared<opcore::FermionPoint>(plane_discrete_F(mass, m_nodes, z));
    sys.samples.push_back(std::move(s));
    sys.total_measure += w;
  }
  sys.spin.reserve(sys.samples.size());
  for (const auto& s : sys.samples) sys.spin.push_back(opcore::spin_space(s.point));
  sys.validate();
  return sys;
}

Matrix lattice_F(const Eigen::Vector2d& z) {
  std::vector<Vector> v(3, Vector(2));
  v[0] << 1, 0;
  v[1] << std::exp(cplx(0, -z(0))), std::exp(cplx(0, -z(0)));
  v[2] << std::exp(cplx(0, -z(1))), cplx(0, 1) * std::exp(cplx(0, -z(1)));
  Matrix f(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) f(i, j) = -(v[i].adjoint() * v[j])(0);
  return f;
}

SampledSystem build_torus_lattice(double kappa) {
  double ratio = 2.0 * M_PI / kappa;
  int n = (int)std::llround(ratio);
  if (std::abs(ratio - n) > 1e-9 || n < 1)
    throw std::invalid_argument("build_torus_lattice: 2*pi/kappa must be a positive integer");
  SampledSystem sys;
  sys.hilbert = HilbertModel(3);
  sys.signature = SpinSignature(0, 2);
  const double w = kappa * kappa / (4.0 * M_PI * M_PI);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Sample s;
      s.coords.resize(2);
      s.coords << i * kappa, j * kappa;
      s.weight = w;
      s.point = std::make_shared<opcore::FermionPoint>(lattice_F({i * kappa, j * kappa}));
      sys.samples.push_back(std::move(s));
      sys.total_measure += w;
    }
  sys.spin.reserve(sys.samples.size());
  for (const auto& s : sys.samples) sys.spin.push_back(opcore::spin_space(s.point));
  sys.validate();
  return sys;
}

SampledSystem provider_system_with_polar_grid(std::shared_ptr<const KernelProvider> provider,
                                              const Eigen::Vector2d& center, double rmax, int n_r,
                                              int n_t) {
  if (!provider) throw std::invalid_argument("provider_system_with_polar_grid: null provider");
  if (n_r < 1 || n_t < 2 || rmax <= 0) throw std::invalid_argument("polar grid: bad parameters");
  SampledSystem sys;
  sys.signature = provider->riemannian() ? SpinSignature(0, 2) : SpinSignature(1, 1);
  sys.provider = std::move(provider);
  const double dr = rmax / n_r, dth = 2.0 * M_PI / n_t;
  Sample c;
  c.coords = center;
  c.weight = M_PI * (0.5 * dr) * (0.5 * dr);
  sys.samples.push_back(c);
  sys.total_measure += c.weight;
  for (int i = 0; i < n_r; ++i) {
    double r = (i + 0.5) * dr;
    for (int j = 0; j < n_t; ++j) {
      double th = (j + 0.5) * dth;
      Sample s;
      s.coords.resize(2);
      s.coords << center(0) + r * std::cos(th), center(1) + r * std::sin(th);
      s.weight = r * dr * dth;
      sys.samples.push_back(std::move(s));
      sys.total_measure += r * dr * dth;
    }
  }
  sys.validate();
  return sys;
}

PairFrames pair_frames(const KernelProvider& prov, const Eigen::Vector2d& x,
                       const Eigen::Vector2d& y) {
  PairFrames pf;
  pf.P_xy = prov.eval_P(x, y);
  pf.P_yx = prov.eval_P(y, x);
  pf.nu = prov.eval_nu();
  pf.signs.resize(2);
  pf.signs << (pf.nu(0) < 0 ? 1 : -1), (pf.nu(1) < 0 ? 1 : -1);
  return pf;
}

namespace {
// Hilbert-space Gram of the pair of canonical frames {f(x), f(y)}:
// <f_a(x)|f_b(y)>_H = -(G_f P(x,y))_ab / (nu_a nu_b).
Matrix pair_gram(const PairFrames& pf, const Mat2& fibre_gram) {
  auto blk = [&](const Mat2& p) {
    Mat2 gp = fibre_gram * p;
    Mat2 out;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) out(a, b) = -gp(a, b) / (pf.nu(a) * pf.nu(b));
    return out;
  };
  Mat2 dxx;
  dxx << pf.nu(0), 0, 0, pf.nu(1);
  Matrix g(4, 4);
  g.block<2, 2>(0, 0) = blk(dxx);
  g.block<2, 2>(2, 2) = blk(dxx);
  g.block<2, 2>(0, 2) = blk(pf.P_xy);
  g.block<2, 2>(2, 0) = Matrix(blk(pf.P_xy)).adjoint();
  return g;
}

// Coefficient matrices of F(x), F(y) on the basis (f(x)_1, f(x)_2, f(y)_1, f(y)_2).
void pair_coefficients(const PairFrames& pf, Matrix& xc, Matrix& yc) {
  Mat2 d = Mat2::Zero(), dinv = Mat2::Zero();
  d(0, 0) = pf.nu(0);
  d(1, 1) = pf.nu(1);
  dinv(0, 0) = 1.0 / pf.nu(0);
  dinv(1, 1) = 1.0 / pf.nu(1);
  xc = Matrix::Zero(4, 4);
  yc = Matrix::Zero(4, 4);
  xc.block<2, 2>(0, 0) = d;
  xc.block<2, 2>(0, 2) = d * pf.P_xy * dinv;
  yc.block<2, 2>(2, 2) = d;
  yc.block<2, 2>(2, 0) = d * pf.P_yx * dinv;
}
}  // namespace

double pair_op_distance(const PairFrames& pf) {
  Mat2 fg;
  fg = (pf.signs(0) == 1 && pf.signs(1) == 1) ? Mat2(Mat2::Identity()) : mats::gamma0();
  // Riemannian signs are (1,1); Lorentzian pair uses gamma0 as fibre gram.
  Matrix g4 = pair_gram(pf, fg);
  Matrix xc, yc;
  pair_coefficients(pf, xc, yc);
  Matrix a = yc - xc;
  Matrix lhs = a.adjoint() * g4 * a;
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(0.5 * (lhs + Matrix(lhs.adjoint())),
                                                       0.5 * (g4 + Matrix(g4.adjoint())));
  double lam = ges.eigenvalues().maxCoeff();
  return std::sqrt(std::max(0.0, lam));
}

PairEmbedding embed_pair(const KernelProvider& prov, const Eigen::Vector2d& x,
                         const Eigen::Vector2d& y) {
  PairFrames pf = pair_frames(prov, x, y);
  Matrix g4 = pair_gram(pf, prov.fibre_gram());
  Eigen::LLT<Matrix> llt(0.5 * (g4 + Matrix(g4.adjoint())));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("embed_pair: pair Gram not positive definite (frames degenerate)");
  Matrix l = llt.matrixL();
  Matrix basis = l.adjoint();  // columns c_j with c_i^dagger c_j = G4_ij
  Matrix xc, yc;
  pair_coefficients(pf, xc, yc);
  Matrix binv = basis.inverse();
  PairEmbedding pe;
  pe.x_op = basis * xc * binv;
  pe.y_op = basis * yc * binv;
  pe.x_op = 0.5 * (pe.x_op + Matrix(pe.x_op.adjoint()));
  pe.y_op = 0.5 * (pe.y_op + Matrix(pe.y_op.adjoint()));
  pe.frame_x = basis.leftCols(2);
  pe.frame_y = basis.rightCols(2);
  pe.nu = pf.nu;
  pe.signs = pf.signs;
  return pe;
}

std::string tabulate_provider_csv(const KernelProvider& prov, const Eigen::Vector2d& zmin,
                                  const Eigen::Vector2d& zmax, int n) {
  util::CsvWriter csv({"xi0", "xi1", "re_p00", "im_p00", "re_p01", "im_p01", "re_p10", "im_p10",
                       "re_p11", "im_p11"});
  Eigen::Vector2d zero(0, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::Vector2d z;
      z << zmin(0) + (zmax(0) - zmin(0)) * (n == 1 ? 0.0 : (double)i / (n - 1)),
          zmin(1) + (zmax(1) - zmin(1)) * (n == 1 ? 0.0 : (double)j / (n - 1));
      Mat2 p = prov.eval_P(z, zero);
      csv.row({z(0), z(1), p(0, 0).real(), p(0, 0).imag(), p(0, 1).real(), p(0, 1).imag(),
               p(1, 0).real(), p(1, 0).imag(), p(1, 1).real(), p(1, 1).imag()});
    }
  return csv.str();
}

}  // namespace cfl::builders
