#![allow(dead_code)]

use std::path::PathBuf;

use cgkit::gaussian::GaussianSystem;
use cgkit::{parse, ChainGraph, GraphFile};
use nalgebra::DMatrix;

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden").join(name)
}

pub fn golden(name: &str) -> GraphFile {
    let text = std::fs::read_to_string(golden_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Compares `actual` with a frozen file, writing the file when it does not
/// exist yet or when `CGKIT_BLESS` is set.
pub fn frozen(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("CGKIT_BLESS").is_some() || !path.exists() {
        std::fs::write(&path, actual).unwrap();
        eprintln!("recorded {}", path.display());
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected, "{name} changed; rerun with CGKIT_BLESS=1 if intended");
}

/// `(I - B)⁻¹ Λ (I - B)⁻ᵀ` over all nodes at once, with `B` holding every
/// coefficient and `Λ` every error block.
pub fn whole_system_covariance(sys: &GaussianSystem, g: &ChainGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut b = DMatrix::zeros(n, n);
    let mut lambda = DMatrix::zeros(n, n);
    for block in &sys.blocks {
        for (r, &m) in block.members.iter().enumerate() {
            for (c, &p) in block.parents.iter().enumerate() {
                b[(m, p)] = block.beta[(r, c)];
            }
            for (c, &m2) in block.members.iter().enumerate() {
                lambda[(m, m2)] = block.lambda[(r, c)];
            }
        }
    }
    let inv = (DMatrix::identity(n, n) - b).try_inverse().expect("I - B is unit triangular up to order");
    &inv * lambda * inv.transpose()
}
