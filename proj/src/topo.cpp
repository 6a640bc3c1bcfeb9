#include "cfl/topo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "cfl/util.hpp"

namespace cfl::topo {

OperatorCloud make_cloud(const builders::SampledSystem& sys, CloudNorm norm) {
  if (!sys.matrix_backed()) throw std::invalid_argument("make_cloud: matrix-backed system required");
  OperatorCloud cloud;
  cloud.norm = norm;
  for (const auto& s : sys.samples) {
    cloud.points.push_back(s.point);
    cloud.weights.push_back(s.weight);
  }
  build_distances(cloud);
  return cloud;
}

void build_distances(OperatorCloud& cloud) {
  const int n = cloud.size();
  cloud.distances = RealMatrix::Zero(n, n);
  util::parallel_for(n, [&](int i) {
    for (int j = i + 1; j < n; ++j) {
      Matrix diff = cloud.points[i]->matrix() - cloud.points[j]->matrix();
      double d = cloud.norm == CloudNorm::HilbertSchmidt ? diff.norm() : util::op_norm(diff);
      cloud.distances(i, j) = d;
    }
  });
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) cloud.distances(i, j) = cloud.distances(j, i);
}

Strata strata(const OperatorCloud& cloud) {
  Strata out;
  std::map<std::pair<int, int>, int> index;
  for (const auto& p : cloud.points) {
    std::pair<int, int> lab = {p->positive_count(), p->negative_count()};
    out.labels.push_back(lab);
    auto it = index.find(lab);
    if (it == index.end()) {
      index[lab] = (int)out.distinct.size();
      out.distinct.push_back(lab);
      out.members.emplace_back();
    }
    out.members[index[lab]].push_back((int)(&p - cloud.points.data()));
  }
  return out;
}

namespace {
NerveComplex complex_from_threshold(const OperatorCloud& cloud,
                                    const std::function<double(int, int)>& threshold, double scale) {
  NerveComplex out;
  out.vertices = cloud.size();
  out.scale = scale;
  const int n = cloud.size();
  std::vector<std::vector<int>> adj(n);
  long pairs = 0, npairs = (long)n * (n - 1) / 2;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (cloud.distances(i, j) < threshold(i, j)) {
        out.edges.push_back({i, j});
        adj[i].push_back(j);
        ++pairs;
      }
    }
  out.complete = (pairs == npairs);
  if (out.complete) return out;  // 2-skeleton of a simplex: homology is trivial
  std::vector<std::vector<bool>> has(n, std::vector<bool>(n, false));
  for (const auto& e : out.edges) has[e.first][e.second] = true;
  for (const auto& e : out.edges) {
    int a = e.first, b = e.second;
    for (int c : adj[a])
      if (c > b && has[b][c]) out.triangles.push_back({a, b, c});
  }
  return out;
}
}  // namespace

NerveComplex m_r_complex(const OperatorCloud& cloud, double r) {
  return complex_from_threshold(cloud, [r](int, int) { return 2.0 * r; }, r);
}

RDelta r_delta(const OperatorCloud& cloud, int x, double delta) {
  RDelta out;
  const int n = cloud.size();
  double total = 0.0;
  std::vector<std::pair<double, double>> dw(n);  // (distance, weight)
  for (int j = 0; j < n; ++j) {
    double w = cloud.weights.empty() ? 1.0 / n : cloud.weights[j];
    dw[j] = {cloud.distances(x, j), w};
    total += w;
  }
  if (delta > total) {
    out.infinite = true;
    return out;
  }
  std::sort(dw.begin(), dw.end());
  // sup over r with mass({d < r}) < delta: the largest listed distance whose
  // strictly-smaller mass stays below delta (left-continuous choice)
  double best = 0.0, below = 0.0;
  size_t i = 0;
  while (i < dw.size()) {
    double r = dw[i].first;
    if (below < delta) best = r;
    while (i < dw.size() && dw[i].first == r) {
      below += dw[i].second;
      ++i;
    }
  }
  if (below < delta) {
    // even the full mass stays below delta only when delta > total (handled),
    // so this branch means delta == total: sup is the diameter
    best = dw.back().first;
  }
  out.value = best;
  return out;
}

NerveComplex m_delta_complex(const OperatorCloud& cloud, double delta) {
  const int n = cloud.size();
  std::vector<double> rad(n);
  for (int i = 0; i < n; ++i) {
    RDelta rd = r_delta(cloud, i, delta);
    if (rd.infinite) throw std::runtime_error("m_delta_complex: r_delta infinite (delta > total mass)");
    rad[i] = rd.value;
  }
  return complex_from_threshold(
      cloud, [&rad](int i, int j) { return rad[i] + rad[j]; }, delta);
}

namespace {
// GF(2) rank by incremental elimination with bitset rows; stops early once the
// rank cap is reached (for d2 the cap is dim ker d1, reached when beta1 = 0).
int gf2_lead(const std::vector<uint64_t>& row) {
  for (int w = (int)row.size() - 1; w >= 0; --w)
    if (row[w]) return 64 * w + (63 - __builtin_clzll(row[w]));
  return -1;
}

int gf2_rank(const std::vector<std::array<int, 3>>& rows, int nbits, int rank_cap) {
  const int words = (nbits + 63) / 64;
  std::vector<std::vector<uint64_t>> pivots;
  std::vector<int> bit_pivot(nbits, -1);
  int rank = 0;
  std::vector<uint64_t> row(words);
  for (const auto& r : rows) {
    if (rank >= rank_cap) break;
    std::fill(row.begin(), row.end(), 0);
    for (int b : r)
      if (b >= 0) row[b / 64] ^= (1ull << (b % 64));
    for (;;) {
      int l = gf2_lead(row);
      if (l < 0) break;
      int p = bit_pivot[l];
      if (p < 0) {
        bit_pivot[l] = (int)pivots.size();
        pivots.push_back(row);
        ++rank;
        break;
      }
      for (int w = 0; w < words; ++w) row[w] ^= pivots[p][w];
    }
  }
  return rank;
}
}  // namespace

BettiReport betti(const NerveComplex& complex) {
  BettiReport out;
  out.vertices = complex.vertices;
  if (complex.complete) {
    // full 2-skeleton of a simplex: beta0 = 1, beta1 = 0
    long e = (long)complex.vertices * (complex.vertices - 1) / 2;
    out.edges = (int)e;
    out.triangles = 0;
    out.rank_d1 = complex.vertices - 1;
    out.rank_d2 = (int)(e - complex.vertices + 1);
    out.beta0 = 1;
    out.beta1 = 0;
    return out;
  }
  out.edges = (int)complex.edges.size();
  out.triangles = (int)complex.triangles.size();

  std::vector<std::array<int, 3>> d1rows;
  d1rows.reserve(complex.edges.size());
  for (const auto& e : complex.edges) d1rows.push_back({e.first, e.second, -1});
  out.rank_d1 = gf2_rank(d1rows, complex.vertices, complex.vertices);

  std::map<std::pair<int, int>, int> eidx;
  for (size_t i = 0; i < complex.edges.size(); ++i) eidx[complex.edges[i]] = (int)i;
  std::vector<std::array<int, 3>> d2rows;
  d2rows.reserve(complex.triangles.size());
  for (const auto& t : complex.triangles)
    d2rows.push_back({eidx[{t[0], t[1]}], eidx[{t[0], t[2]}], eidx[{t[1], t[2]}]});
  int cap = (int)complex.edges.size() - out.rank_d1;  // im d2 inside ker d1
  out.rank_d2 = gf2_rank(d2rows, (int)complex.edges.size(), cap);

  out.beta0 = complex.vertices - out.rank_d1;
  out.beta1 = (int)complex.edges.size() - out.rank_d1 - out.rank_d2;
  return out;
}

std::vector<ScanRow> scale_scan(const OperatorCloud& cloud, const std::vector<double>& r_list) {
  std::vector<ScanRow> out;
  long prev_edges = -1;
  for (double r : r_list) {
    NerveComplex cx = m_r_complex(cloud, r);
    BettiReport b = betti(cx);
    ScanRow row;
    row.r = r;
    row.beta0 = b.beta0;
    row.beta1 = b.beta1;
    row.edge_count = cx.complete ? (long)cloud.size() * (cloud.size() - 1) / 2
                                 : (long)cx.edges.size();
    if (prev_edges >= 0 && row.edge_count < prev_edges)
      throw std::logic_error("scale_scan: edge count not monotone");
    prev_edges = row.edge_count;
    if (b.beta0 == cloud.size() && b.beta1 == 0) row.regime = "discrete";
    else if (b.beta0 == 1 && b.beta1 == 2) row.regime = "torus";
    else if (b.beta0 == 1 && b.beta1 == 0) row.regime = "blob";
    else row.regime = "other";
    out.push_back(row);
  }
  return out;
}

std::string complex_csv(const NerveComplex& complex) {
  std::ostringstream os;
  os << "kind,a,b,c\n";
  for (const auto& e : complex.edges) os << "edge," << e.first << "," << e.second << ",\n";
  for (const auto& t : complex.triangles)
    os << "triangle," << t[0] << "," << t[1] << "," << t[2] << "\n";
  return os.str();
}

}  // namespace cfl::topo
