#ifndef CFL_TOPO_HPP
#define CFL_TOPO_HPP

#include <optional>
#include <string>
#include <vector>

#include "cfl/builders.hpp"

namespace cfl::topo {

enum class CloudNorm { OperatorSup, HilbertSchmidt };

struct OperatorCloud {
  std::vector<std::shared_ptr<const opcore::FermionPoint>> points;
  std::vector<double> weights;  // optional; empty means uniform 1/N
  CloudNorm norm = CloudNorm::OperatorSup;
  RealMatrix distances;  // filled by build_distances

  int size() const { return (int)points.size(); }
};

OperatorCloud make_cloud(const builders::SampledSystem& sys, CloudNorm norm);
void build_distances(OperatorCloud& cloud);

// Partition of the cloud by eigenvalue signature (p_x, q_x).
struct Strata {
  std::vector<std::pair<int, int>> labels;          // per point
  std::vector<std::pair<int, int>> distinct;        // observed strata
  std::vector<std::vector<int>> members;            // per distinct stratum
};

Strata strata(const OperatorCloud& cloud);

struct NerveComplex {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::array<int, 3>> triangles;
  double scale = 0.0;
  bool complete = false;  // every pair is an edge
};

// Rips surrogate for the r-neighborhood nerve: edge iff d < 2r, triangle iff
// all three edges present.
NerveComplex m_r_complex(const OperatorCloud& cloud, double r);

// r_delta(x) = sup{ r : rho(B_r(x)) < delta }; infinite iff delta > total mass.
struct RDelta {
  double value = 0.0;
  bool infinite = false;
};
RDelta r_delta(const OperatorCloud& cloud, int x, double delta);

// Balls of the per-point radii overlap: edge iff d(x,y) < r_delta(x) + r_delta(y).
NerveComplex m_delta_complex(const OperatorCloud& cloud, double delta);

struct BettiReport {
  int beta0 = 0, beta1 = 0;
  int rank_d1 = 0, rank_d2 = 0;
  int vertices = 0, edges = 0, triangles = 0;
};

BettiReport betti(const NerveComplex& complex);

struct ScanRow {
  double r = 0.0;
  int beta0 = 0, beta1 = 0;
  long edge_count = 0;
  std::string regime;  // discrete / torus / blob / other
};

std::vector<ScanRow> scale_scan(const OperatorCloud& cloud, const std::vector<double>& r_list);

std::string complex_csv(const NerveComplex& complex);

}  // namespace cfl::topo

#endif
