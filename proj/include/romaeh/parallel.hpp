#ifndef ROMAEH_PARALLEL_HPP
#define ROMAEH_PARALLEL_HPP

namespace romaeh {

// Execution mode for the hot kernels.  Every parallel kernel keeps a
// serial twin that produces bit-identical results; the serial path is
// the reference used by the tests and the benchmark.
enum class ExecMode { Serial, Parallel };

// Worker cap: 0 means "whatever OpenMP considers the hardware default".
// Resolution order: explicit set_thread_count() (CLI --threads), the
// ROMAEH_THREADS environment variable, then the OpenMP default.
void set_thread_count(int n);
int thread_count();

}  // namespace romaeh

#endif
