#pragma once

#include <iosfwd>
#include <string>

#include "fastpca/sparse.hpp"

namespace fastpca {

// libsvm-style lines: `label idx:val idx:val ...` with 1-based, strictly
// increasing indices per line. Labels are ignored. The ambient dimension is
// the maximum index seen unless dim_hint is larger. Rows are normalized on
// ingestion (normalize_dataset).
DataMatrix ingest_libsvm(std::istream& in, std::size_t dim_hint = 0);

// Dense CSV, one row per line; every line must have the same width.
DataMatrix ingest_csv(std::istream& in);

DataMatrix ingest(const std::string& path, const std::string& format,
                  std::size_t dim_hint = 0);

// The synthetic-spec mini-language:
//   plant d=<int> n=<int> spectrum=geometric(a,r,k)
//   plant d=<int> n=<int> spectrum=list(v1,v2,...)
struct SyntheticSpec {
  std::size_t d = 0;
  std::size_t n = 0;
  Vec spectrum;  // descending, in [0, 1]
};

bool looks_like_synthetic_spec(const std::string& input);
SyntheticSpec parse_synthetic_spec(const std::string& spec);

}  // namespace fastpca
