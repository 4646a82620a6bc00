#include "lvmrs/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace lvmrs::kernels {

namespace detail {

double exp_shift_scale_scalar(const double*, std::size_t, double, double,
                              double*);
void scaled_threshold_scalar(const double*, std::size_t, double, double,
                             double*);
void scale_scalar(double*, std::size_t, double);
double reduce_max_scalar(const double*, std::size_t);
double reduce_sum_scalar(const double*, std::size_t);
std::size_t argmax_scalar(const double*, std::size_t);
void welford_row_scalar(double*, double*, const double*, std::size_t, double);

#if defined(__x86_64__) || defined(_M_X64)
double exp_shift_scale_avx2(const double*, std::size_t, double, double,
                            double*);
void scaled_threshold_avx2(const double*, std::size_t, double, double,
                           double*);
void scale_avx2(double*, std::size_t, double);
double reduce_max_avx2(const double*, std::size_t);
double reduce_sum_avx2(const double*, std::size_t);
std::size_t argmax_avx2(const double*, std::size_t);
void welford_row_avx2(double*, double*, const double*, std::size_t, double);
#endif

}  // namespace detail

namespace {

struct Table {
  double (*exp_shift_scale)(const double*, std::size_t, double, double,
                            double*);
  void (*scaled_threshold)(const double*, std::size_t, double, double,
                           double*);
  void (*scale)(double*, std::size_t, double);
  double (*reduce_max)(const double*, std::size_t);
  double (*reduce_sum)(const double*, std::size_t);
  std::size_t (*argmax)(const double*, std::size_t);
  void (*welford_row)(double*, double*, const double*, std::size_t, double);
};

constexpr Table kScalar = {
    detail::exp_shift_scale_scalar, detail::scaled_threshold_scalar,
    detail::scale_scalar,           detail::reduce_max_scalar,
    detail::reduce_sum_scalar,      detail::argmax_scalar,
    detail::welford_row_scalar,
};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2 = {
    detail::exp_shift_scale_avx2, detail::scaled_threshold_avx2,
    detail::scale_avx2,           detail::reduce_max_avx2,
    detail::reduce_sum_avx2,      detail::argmax_avx2,
    detail::welford_row_avx2,
};
#endif

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa g_isa = Isa::scalar;
const Table* g_table = &kScalar;
std::once_flag g_init;

void init() {
  Isa choice = avx2_supported() ? Isa::avx2 : Isa::scalar;
  if (const char* env = std::getenv("LVMRS_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) choice = Isa::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) choice = Isa::avx2;
  }
  g_isa = choice;
#if defined(__x86_64__) || defined(_M_X64)
  g_table = choice == Isa::avx2 ? &kAvx2 : &kScalar;
#endif
}

const Table& table() {
  std::call_once(g_init, init);
  return *g_table;
}

}  // namespace

Isa active() {
  std::call_once(g_init, init);
  return g_isa;
}

void force(Isa isa) {
  std::call_once(g_init, init);
  if (isa == Isa::avx2) {
    if (!avx2_supported()) throw std::runtime_error("avx2 not available");
#if defined(__x86_64__) || defined(_M_X64)
    g_table = &kAvx2;
#endif
  } else {
    g_table = &kScalar;
  }
  g_isa = isa;
}

const char* name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

double exp_shift_scale(const double* x, std::size_t n, double shift,
                       double inv_t, double* y) {
  return table().exp_shift_scale(x, n, shift, inv_t, y);
}

void scaled_threshold(const double* x, std::size_t n, double inv_t, double rho,
                      double* y) {
  table().scaled_threshold(x, n, inv_t, rho, y);
}

void scale(double* x, std::size_t n, double s) { table().scale(x, n, s); }

double reduce_max(const double* x, std::size_t n) {
  return table().reduce_max(x, n);
}

double reduce_sum(const double* x, std::size_t n) {
  return table().reduce_sum(x, n);
}

std::size_t argmax(const double* x, std::size_t n) {
  return table().argmax(x, n);
}

void welford_row(double* mean, double* m2, const double* x, std::size_t n,
                 double inv_count) {
  table().welford_row(mean, m2, x, n, inv_count);
}

}  // namespace lvmrs::kernels
