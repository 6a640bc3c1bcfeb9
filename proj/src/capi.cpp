#include "cfl.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "cfl/acceptance.hpp"
#include "cfl/builders.hpp"
#include "cfl/scenario.hpp"
#include "cfl/util.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename F>
int guarded(F&& fn, int error_code) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return CFL_ERR_PARAMS;
  } catch (const std::exception& e) {
    set_error(e.what());
    return error_code;
  }
}

}  // namespace

struct cfl_system {
  cfl::builders::SampledSystem sys;
};

extern "C" {

const char* cfl_version(void) { return "cfl 1.0.0"; }

const char* cfl_last_error(void) { return g_last_error.c_str(); }

int cfl_run_scenario(const char* name, const char* config_path, const char* out_dir, uint64_t seed,
                     int plot_data) {
  if (!name) {
    set_error("null scenario name");
    return CFL_ERR_INVALID;
  }
  std::ostringstream log;
  int rc = cfl::cli::run_scenario(name, config_path ? config_path : "",
                                  out_dir ? out_dir : ".", seed, plot_data != 0, log);
  if (out_dir) {
    std::ofstream f(std::string(out_dir) + "/" + name + ".log");
    if (f) f << log.str();
  }
  if (rc != 0) set_error(log.str());
  g_last_error = log.str();
  return rc;
}

char* cfl_list_scenarios(void) {
  std::string all;
  for (const auto& line : cfl::cli::list_scenarios()) all += line + "\n";
  char* out = (char*)std::malloc(all.size() + 1);
  if (!out) return nullptr;
  std::memcpy(out, all.c_str(), all.size() + 1);
  return out;
}

void cfl_string_free(char* s) { std::free(s); }

int cfl_verify_all(const char* out_dir) {
  return guarded(
      [&]() -> int {
        std::ostringstream table;
        auto results = cfl::acceptance::run_all(&table);
        if (out_dir) {
          std::ofstream f(std::string(out_dir) + "/acceptance.txt");
          if (f) f << table.str();
        }
        g_last_error = table.str();
        for (const auto& r : results)
          if (!r.passed) return CFL_ERR_NUMERICAL;
        return CFL_OK;
      },
      CFL_ERR_NUMERICAL);
}

cfl_system* cfl_system_sphere(int subdivisions) {
  try {
    g_last_error.clear();
    auto* h = new cfl_system;
    h->sys = cfl::builders::build_dirac_sphere({cfl::builders::SphereKind::Single, subdivisions});
    return h;
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

cfl_system* cfl_system_lattice(double kappa) {
  try {
    g_last_error.clear();
    auto* h = new cfl_system;
    h->sys = cfl::builders::build_torus_lattice(kappa);
    return h;
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

cfl_system* cfl_system_torus_scalar(double cutoff, int grid_n) {
  try {
    g_last_error.clear();
    auto* h = new cfl_system;
    h->sys = cfl::builders::build_torus_scalar(cutoff, grid_n);
    return h;
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

void cfl_system_free(cfl_system* sys) { delete sys; }

int cfl_system_size(const cfl_system* sys) { return sys ? (int)sys->sys.samples.size() : -1; }

int cfl_system_hilbert_dim(const cfl_system* sys) { return sys ? sys->sys.hilbert.dim : -1; }

cfl_status cfl_system_point(const cfl_system* sys, int index, double* out, size_t len) {
  if (!sys || !out || index < 0 || index >= (int)sys->sys.samples.size()) {
    set_error("bad handle or index");
    return CFL_ERR_INVALID;
  }
  const cfl::Matrix& m = sys->sys.samples[index].point->matrix();
  size_t need = 2 * (size_t)m.rows() * (size_t)m.cols();
  if (len < need) {
    set_error("buffer too small");
    return CFL_ERR_INVALID;
  }
  size_t k = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      out[k++] = m(i, j).real();
      out[k++] = m(i, j).imag();
    }
  return CFL_OK;
}

cfl_status cfl_system_eigenvalues(const cfl_system* sys, int index, double* out, size_t len) {
  if (!sys || !out || index < 0 || index >= (int)sys->sys.samples.size()) {
    set_error("bad handle or index");
    return CFL_ERR_INVALID;
  }
  const auto& ev = sys->sys.samples[index].point->eigenvalues();
  if (len < (size_t)ev.size()) {
    set_error("buffer too small");
    return CFL_ERR_INVALID;
  }
  for (int i = 0; i < ev.size(); ++i) out[i] = ev(i);
  return CFL_OK;
}

cfl_status cfl_causal_classify(const cfl_system* sys, int i, int j, int* relation_out) {
  if (!sys || !relation_out || i < 0 || j < 0 || i >= (int)sys->sys.samples.size() ||
      j >= (int)sys->sys.samples.size()) {
    set_error("bad handle or index");
    return CFL_ERR_INVALID;
  }
  return (cfl_status)guarded(
      [&]() -> int {
        auto cs = cfl::opcore::causal_classify(*sys->sys.samples[i].point,
                                               *sys->sys.samples[j].point);
        switch (cs.relation) {
          case cfl::opcore::CausalRelation::Timelike: *relation_out = 0; break;
          case cfl::opcore::CausalRelation::Spacelike: *relation_out = 1; break;
          default: *relation_out = 2; break;
        }
        return CFL_OK;
      },
      CFL_ERR_NUMERICAL);
}

cfl_status cfl_system_export_json(const cfl_system* sys, const char* path) {
  if (!sys || !path) {
    set_error("bad handle or path");
    return CFL_ERR_INVALID;
  }
  return (cfl_status)guarded(
      [&]() -> int {
        return cfl::util::write_text(path, cfl::cli::system_json(sys->sys)) ? CFL_OK
                                                                            : CFL_ERR_INVALID;
      },
      CFL_ERR_INVALID);
}

}  // extern "C"
