fn main() {
    // Dense symmetric eigensolves and matrix powers go through the system
    // LAPACK/BLAS (dsyevd_, dgemm_) shipped with libopenblas-dev.
    println!("cargo:rustc-link-lib=dylib=openblas");
}
