// The dimension-scale API lives in the HDF5 high-level library, which the
// hdf5 crate does not link. Debian ships it as `hdf5_serial_hl`.
fn main() {
    println!("cargo:rerun-if-env-changed=HDF5_HL_LIB");
    let lib = std::env::var("HDF5_HL_LIB").unwrap_or_else(|_| {
        let debian = ["/usr/lib/x86_64-linux-gnu", "/usr/lib/aarch64-linux-gnu", "/usr/lib"]
            .iter()
            .any(|d| std::path::Path::new(d).join("libhdf5_serial_hl.so").exists());
        if debian { "hdf5_serial_hl" } else { "hdf5_hl" }.to_string()
    });
    println!("cargo:rustc-link-lib={lib}");
}
