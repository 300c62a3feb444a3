use super::CayleyLoop;
use crate::error::{Error, Result};

pub const CORPUS_NAMES: &[&str] =
    &["trivial", "z2", "z4", "klein4", "loop5", "s3", "d8", "moufang12", "moufang16", "d32"];

fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "trivial" => include_str!("../../corpus/trivial.tbl"),
        "z2" => include_str!("../../corpus/z2.tbl"),
        "z4" => include_str!("../../corpus/z4.tbl"),
        "klein4" => include_str!("../../corpus/klein4.tbl"),
        "s3" => include_str!("../../corpus/s3.tbl"),
        "d8" => include_str!("../../corpus/d8.tbl"),
        "loop5" => include_str!("../../corpus/loop5.tbl"),
        "moufang12" => include_str!("../../corpus/moufang12.tbl"),
        "moufang16" => include_str!("../../corpus/moufang16.tbl"),
        "d32" => include_str!("../../corpus/d32.tbl"),
        _ => return None,
    })
}

/// A bundled loop by name.
pub fn corpus_loop(name: &str) -> Result<CayleyLoop> {
    let src = source(name).ok_or_else(|| Error::InvalidParameter(format!("no bundled loop named {name:?}")))?;
    CayleyLoop::parse_text(src)
}

/// All bundled loops, smallest first.
pub fn corpus() -> Vec<(&'static str, CayleyLoop)> {
    CORPUS_NAMES.iter().map(|&n| (n, corpus_loop(n).expect("bundled tables are valid"))).collect()
}
