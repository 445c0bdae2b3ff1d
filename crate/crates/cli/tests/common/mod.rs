//! The golden transcripts shared by the CLI tests and the acceptance suite.

#![allow(dead_code)]

use std::path::PathBuf;

use serde_json::{json, Value};

pub struct Transcript {
    pub name: &'static str,
    pub args: &'static [&'static str],
    /// Value for the size cap override.
    pub size_cap: Option<&'static str>,
}

const fn t(name: &'static str, args: &'static [&'static str]) -> Transcript {
    Transcript { name, args, size_cap: None }
}

pub const TRANSCRIPTS: &[Transcript] = &[
    t("rank_chain4", &["rank", "tests/data/chain4.json", "--delta", "x<y", "-n", "1", "--cap", "8", "--shelah"]),
    t("rank_inconsistent", &["rank", "tests/data/chain4.json", "--delta", "x<y", "--set", "x<x"]),
    Transcript {
        name: "rank_chain100_cap1",
        args: &["rank", "tests/data/chain100.json", "--delta", "x<y", "--cap", "1"],
        size_cap: Some("128"),
    },
    t("rank_chain100_over_cap", &["rank", "tests/data/chain100.json", "--delta", "x<y", "--cap", "1"]),
    t("opdim_dlo", &["opdim", "dlo", "--delta", "x<y"]),
    t("opdim_pure", &["opdim", "tests/data/pure4.json", "--delta", "x=y"]),
    t("ird_dlo_line", &["ird", "dlo", "--delta", "x<y;y<x", "--depth", "2"]),
    t("ird_dlo_plane", &["ird", "dlo", "--vars", "x0,x1", "--delta", "x0<y;y<x0;x1<y;y<x1", "--depth", "2"]),
    t("ict_check", &["ict", "dlo", "--check", "tests/data/ict_intervals.json"]),
    t("dprank_pure", &["dprank", "tests/data/pure4.json", "--delta", "x=y", "--length", "5"]),
    t("mo_gen", &["mo", "gen", "-n", "2", "--size", "16", "--seed", "7"]),
    t("mo_cuts", &["mo", "cuts", "tests/data/crossing.json", "--list"]),
    t("mo_embed", &["mo", "embed", "tests/data/random6.json"]),
    t("mo_linearize", &["mo", "linearize", "--side-log", "2", "-n", "2", "--seed", "1"]),
    t("mo_amalgamate", &["mo", "amalgamate", "tests/data/amalgam.json"]),
    t("mo_extcheck", &["mo", "extcheck", "tests/data/chain3.json", "-k", "1"]),
    t("mo_moptest_chain", &["mo", "moptest", "dlo", "tests/data/picture_chain.json"]),
    t("mo_moptest_crossing", &["mo", "moptest", "dlo", "tests/data/picture_crossing.json"]),
    t("mo_invalid", &["mo", "cuts", "tests/data/bad_mo.json"]),
    t("omin_qe", &["omin", "qe", "exists y. x<y & y<z"]),
    t("omin_dim", &["omin", "dim", "x0=x1", "-m", "2"]),
    t("omin_dim_empty", &["omin", "dim", "x0<x1 & x1<x0", "-m", "2"]),
    t("omin_cells", &["omin", "cells", "x0<1", "-m", "1"]),
    t("omin_irdwitness", &["omin", "irdwitness", "x0<x1", "-m", "2"]),
    t("omin_prodcheck", &["omin", "prodcheck", "x0<1", "x0=x1", "--m2", "2"]),
];

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"))
}

/// The deterministic part of a run: everything but the timing.
pub fn transcript(tr: &Transcript) -> Value {
    let out = opdim_cli::run_with(tr.args.iter().copied(), tr.size_cap.map(String::from));
    json!({
        "args": tr.args,
        "size_cap": tr.size_cap,
        "exit_code": out.code,
        "summary": out.report.as_ref().map(|r| r.summary.clone()),
        "hash": out.report.as_ref().map(|r| r.hash.clone()),
        "error": out.failure.as_ref().map(|f| f.kind.clone()),
        "result": out.report.map(|r| r.result),
    })
}

/// Runs every transcript from the crate directory, where the data paths
/// resolve.
pub fn in_crate_dir() {
    std::env::set_current_dir(env!("CARGO_MANIFEST_DIR")).expect("crate directory exists");
}
