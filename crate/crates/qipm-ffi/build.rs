use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap());
    let header = crate_dir.join("include").join("qipm.h");

    let config = cbindgen::Config {
        language: cbindgen::Language::C,
        include_guard: Some("QIPM_H".into()),
        cpp_compat: true,
        documentation: true,
        header: Some(
            "/* C interface to the qipm interior point solver.\n\
             * Generated by cbindgen; do not edit by hand. */"
                .into(),
        ),
        enumeration: cbindgen::EnumConfig {
            // keep enum constants out of the global C namespace
            prefix_with_name: true,
            ..Default::default()
        },
        ..Default::default()
    };

    match cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
    {
        Ok(bindings) => {
            bindings.write_to_file(&header);
        }
        // Syntax errors mid-edit should not hide the real rustc message.
        Err(cbindgen::Error::ParseSyntaxError { .. }) => {}
        Err(e) => panic!("header generation failed: {e}"),
    }
    println!("cargo:rerun-if-changed=src/lib.rs");
}
