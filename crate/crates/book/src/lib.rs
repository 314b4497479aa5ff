//! Guide chapters compiled as doc-tests so the samples stay in sync with the
//! library.

macro_rules! chapters {
    ($($module:ident => $file:literal),* $(,)?) => {
        $(
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            pub mod $module {}
        )*
    };
}

chapters!(
    introduction => "introduction.md",
    measures => "measures.md",
    targets => "targets.md",
    kernels => "kernels.md",
    coupling => "coupling.md",
    diagnostics => "diagnostics.md",
    harness => "harness.md",
    formats => "formats.md",
);
