#pragma once
#include <string>

#include "eulerforge/field.hpp"

namespace ef {

// "EFLD" v1 dump: magic, u32 version, u8 rank, u8 symmetric, u16 ncomp,
// 3 x u32 dims, f64 time, then payload (f64 real, or interleaved re/im).
struct EfldInfo {
  int rank = 0;
  bool symmetric = false;
  int ncomp = 0;
  int dims[3] = {0, 0, 0};
  double time = 0.0;
  bool complex_payload = false;
};

void write_efld(const std::string& path, const Field& f, bool complex_payload = false);
Field read_efld(const std::string& path, EfldInfo* info = nullptr);
EfldInfo read_efld_info(const std::string& path);

}  // namespace ef
