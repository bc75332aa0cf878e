//! Generates `include/hilbert_forge.h` from the public `extern "C"` surface.

fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    println!("cargo:rerun-if-changed=src/lib.rs");
    let mut config = cbindgen::Config::default();
    config.enumeration.prefix_with_name = true;
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .with_language(cbindgen::Language::C)
        .with_include_guard("HILBERT_FORGE_H")
        .with_header("/* C interface for hilbert-forge.  Generated; do not edit. */")
        .with_cpp_compat(true)
        .generate()
        .expect("cbindgen failed")
        .write_to_file(format!("{crate_dir}/include/hilbert_forge.h"));
}
