#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "wcpl/eigensolver.hpp"

namespace wcpl {

// Reproducibility stamp carried by every emitted file. Timestamps are
// opt-in so that default outputs are byte-identical across reruns.
struct Provenance {
    std::uint64_t config_hash = 0;
    std::string version;
    std::uint64_t seed = 0;
    bool timestamps = false;
};

std::string hash_hex(std::uint64_t h);

// Shortest text that round-trips a double exactly.
std::string fmt17(double v);

// '#'-prefixed header lines for text outputs.
std::string provenance_lines(const Provenance& prov);

// Streaming writer for the sweep CSV. Each append writes one row and
// flushes, so an interrupted sweep leaves every completed alpha on disk.
class CurveCsv {
  public:
    CurveCsv(const std::string& path, const Provenance& prov);
    void append(const SpectralResult& res);

  private:
    std::ofstream out_;
};

struct BoundsRow {
    std::string check_name;
    double p = 0.0;
    int dim = 0;
    double alpha = 0.0;
    std::string parameter;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

void write_bounds_csv(const std::string& path, const Provenance& prov,
                      const std::vector<BoundsRow>& rows);

// Plot-ready two-column file: log alpha, log(-lambda).
void write_plot_dat(const std::string& path, const Provenance& prov,
                    const std::vector<double>& alphas,
                    const std::vector<double>& lambdas);

}  // namespace wcpl
