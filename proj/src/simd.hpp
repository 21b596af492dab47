#pragma once

// Hot loops get an AVX2 clone picked at load time. Contraction stays off, so
// every clone produces the same bits.
#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__) && defined(__linux__)
#  define MULLER_HOT_LOOP __attribute__((target_clones("avx2", "default")))
#else
#  define MULLER_HOT_LOOP
#endif
