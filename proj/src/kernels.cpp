#include "platecol/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace platecol::kernels {
namespace {

const Table* select_initial() {
  const char* env = std::getenv("PLATECOL_KERNELS");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_table();
    if (std::strcmp(env, "avx2") == 0 && avx2_table() != nullptr)
      return avx2_table();
  }
  if (const Table* t = avx2_table()) return t;
  return &scalar_table();
}

const Table* g_active = nullptr;

}  // namespace

const Table& active() {
  if (g_active == nullptr) g_active = select_initial();
  return *g_active;
}

void set_active(const Table& table) { g_active = &table; }

}  // namespace platecol::kernels
