# Core infrastructure: errors, signal kernels and WAV codec
