#pragma once

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace bsq {

/// Time stepping allocates and frees many field-sized buffers per step. With
/// glibc's default trim threshold those pages go back to the kernel after
/// every step and the page faults dominate. Call once at program start.
inline void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_TRIM_THRESHOLD, 256 * 1024 * 1024);
  mallopt(M_TOP_PAD, 64 * 1024 * 1024);
  mallopt(M_MMAP_THRESHOLD, 64 * 1024 * 1024);
#endif
}

}  // namespace bsq
