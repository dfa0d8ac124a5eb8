#include "fastpca/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fastpca {

namespace {

double parse_double(const std::string& tok, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("malformed number '" + tok + "'", line);
  }
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

DataMatrix ingest_libsvm(std::istream& in, std::size_t dim_hint) {
  std::vector<std::vector<SparseVector::Entry>> raw;
  std::size_t max_index = dim_hint;  // 1-based
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;  // label, ignored
    std::vector<SparseVector::Entry> entries;
    std::size_t prev_idx = 0;
    while (ls >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size()) {
        throw ParseError("expected idx:value, got '" + tok + "'", lineno);
      }
      std::size_t idx = 0;
      try {
        idx = std::stoul(tok.substr(0, colon));
      } catch (const std::exception&) {
        throw ParseError("malformed index in '" + tok + "'", lineno);
      }
      if (idx == 0) throw ParseError("indices are 1-based", lineno);
      if (idx <= prev_idx) throw ParseError("indices not strictly increasing", lineno);
      double val = parse_double(tok.substr(colon + 1), lineno);
      if (val != 0.0) {
        entries.emplace_back(static_cast<std::uint32_t>(idx - 1), val);
      }
      prev_idx = idx;
      max_index = std::max(max_index, idx);
    }
    raw.push_back(std::move(entries));
  }
  if (raw.empty()) throw InputError("ingest: no data rows");
  if (max_index == 0) throw InputError("ingest: all rows empty");
  std::vector<SparseVector> rows;
  rows.reserve(raw.size());
  for (auto& entries : raw) rows.emplace_back(max_index, std::move(entries));
  return normalize_dataset(std::move(rows));
}

DataMatrix ingest_csv(std::istream& in) {
  std::vector<Vec> raw;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    Vec row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      row.push_back(parse_double(trim(cell), lineno));
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw ParseError("row width " + std::to_string(row.size()) + " does not match " +
                           std::to_string(width),
                       lineno);
    }
    raw.push_back(std::move(row));
  }
  if (raw.empty()) throw InputError("ingest: no data rows");
  return normalize_dataset(raw);
}

DataMatrix ingest(const std::string& path, const std::string& format, std::size_t dim_hint) {
  std::ifstream in(path);
  if (!in) throw InputError("ingest: cannot open '" + path + "'");
  if (format == "libsvm") return ingest_libsvm(in, dim_hint);
  if (format == "csv") return ingest_csv(in);
  throw InputError("ingest: unknown format '" + format + "' (libsvm|csv)");
}

bool looks_like_synthetic_spec(const std::string& input) {
  return input.rfind("plant ", 0) == 0 || input == "plant";
}

SyntheticSpec parse_synthetic_spec(const std::string& spec) {
  std::istringstream ss(spec);
  std::string tok;
  ss >> tok;
  if (tok != "plant") throw InputError("synthetic spec must start with 'plant'");
  SyntheticSpec out;
  while (ss >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw InputError("synthetic spec: expected key=value, got '" + tok + "'");
    std::string key = tok.substr(0, eq);
    std::string val = tok.substr(eq + 1);
    if (key == "d") {
      out.d = std::stoul(val);
    } else if (key == "n") {
      out.n = std::stoul(val);
    } else if (key == "spectrum") {
      auto open = val.find('(');
      auto close = val.rfind(')');
      if (open == std::string::npos || close == std::string::npos || close < open) {
        throw InputError("synthetic spec: malformed spectrum '" + val + "'");
      }
      std::string kind = val.substr(0, open);
      std::string args = val.substr(open + 1, close - open - 1);
      std::vector<double> nums;
      std::istringstream as(args);
      std::string cell;
      while (std::getline(as, cell, ',')) {
        try {
          nums.push_back(std::stod(cell));
        } catch (const std::exception&) {
          throw InputError("synthetic spec: malformed spectrum value '" + cell + "'");
        }
      }
      if (kind == "geometric") {
        if (nums.size() != 3) throw InputError("geometric(a,r,k) needs three arguments");
        double a = nums[0], r = nums[1];
        auto k = static_cast<std::size_t>(nums[2]);
        if (!(a > 0.0) || a > 1.0 || !(r > 0.0) || r > 1.0 || k == 0) {
          throw InputError("geometric(a,r,k): need a,r in (0,1] and k >= 1");
        }
        out.spectrum.clear();
        double v = a;
        for (std::size_t i = 0; i < k; ++i) {
          out.spectrum.push_back(v);
          v *= r;
        }
      } else if (kind == "list") {
        if (nums.empty()) throw InputError("list(...) needs at least one value");
        out.spectrum = nums;
      } else {
        throw InputError("synthetic spec: unknown spectrum kind '" + kind + "'");
      }
    } else {
      throw InputError("synthetic spec: unknown key '" + key + "'");
    }
  }
  if (out.d == 0 || out.n == 0 || out.spectrum.empty()) {
    throw InputError("synthetic spec needs d=, n= and spectrum=");
  }
  if (out.spectrum.size() > out.d) {
    throw InputError("synthetic spec: more spectrum values than dimensions");
  }
  return out;
}

}  // namespace fastpca
