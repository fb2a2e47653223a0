use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").expect("manifest dir"));
    let mut config = cbindgen::Config::default();
    config.language = cbindgen::Language::C;
    config.header = Some(
        "/* C interface for the rcprod ray class group toolkit. Generated; do not edit. */".into(),
    );
    config.include_guard = Some("RCPROD_H".into());
    config.cpp_compat = true;
    config.documentation = true;
    let out = crate_dir.join("include").join("rcprod.h");
    std::fs::create_dir_all(out.parent().expect("include dir")).expect("create include dir");
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("cbindgen generation")
        .write_to_file(out);
    println!("cargo:rerun-if-changed=src/lib.rs");
}
