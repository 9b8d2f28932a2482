#ifndef WEYLAB_CSV_HPP
#define WEYLAB_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "weylab/errors.hpp"
#include "weylab/spectral.hpp"

namespace weylab {

/// 17 significant digits: doubles round-trip exactly, CSVs byte-identical
/// across runs.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw InputError("CsvWriter: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

inline void write_spectrum_csv(const std::string& path, const SpectralData& spec) {
  CsvWriter csv(path, {"j", "lambda", "trusted"});
  for (int j = 0; j < spec.size(); ++j)
    csv.row({std::to_string(j), format_double(spec.eigenvalues[j]),
             j < spec.trusted_count ? "1" : "0"});
}

}  // namespace weylab

#endif  // WEYLAB_CSV_HPP
