#include "opk/simd.hpp"

#include <cstdlib>
#include <cstring>

namespace opk::simd {

namespace {

struct Table {
    Isa isa;
    void (*rotate_pair)(Complex *, Complex *, std::size_t, double, Complex) noexcept;
    Complex (*dot)(const Complex *, const Complex *, std::size_t) noexcept;
    Complex (*dotc)(const Complex *, const Complex *, std::size_t) noexcept;
    void (*squared_distances)(const double *, std::size_t, std::size_t, double *);
};

Table select() {
    Table scalar_table{Isa::Scalar, &scalar::rotate_pair, &scalar::dot, &scalar::dotc, &scalar::squared_distances};
    if (const char *env = std::getenv("OPK_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
        return scalar_table;
    }
#if OPK_HAVE_AVX2_TU
    if (avx2_available()) {
        return {Isa::Avx2, &avx2::rotate_pair, &avx2::dot, &avx2::dotc, &avx2::squared_distances};
    }
#endif
    return scalar_table;
}

const Table &table() {
    static const Table t = select();
    return t;
}

}  // namespace

bool avx2_available() noexcept {
#if OPK_HAVE_AVX2_TU && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa active_isa() noexcept { return table().isa; }

const char *isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

void rotate_pair(Complex *x, Complex *y, std::size_t n, double c, Complex sigma) noexcept {
    table().rotate_pair(x, y, n, c, sigma);
}

Complex dot(const Complex *a, const Complex *b, std::size_t n) noexcept { return table().dot(a, b, n); }

Complex dotc(const Complex *a, const Complex *b, std::size_t n) noexcept { return table().dotc(a, b, n); }

void squared_distances(const double *points, std::size_t n, std::size_t m, double *out) {
    table().squared_distances(points, n, m, out);
}

}  // namespace opk::simd
