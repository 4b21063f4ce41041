use std::env;
use std::path::PathBuf;

fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let header = crate_dir.join("include").join("casimir.h");
    std::fs::create_dir_all(header.parent().unwrap()).unwrap();

    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml"))
        .expect("cbindgen.toml must parse");
    cbindgen::generate_with_config(&crate_dir, config)
        .expect("header generation failed")
        .write_to_file(header);
}
