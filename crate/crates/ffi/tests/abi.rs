use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use predcut_ffi::*;

fn two_triangles() -> *mut PcGraph {
    let us = [0usize, 1, 0, 3, 4, 3, 2];
    let vs = [1usize, 2, 2, 4, 5, 5, 3];
    let ws = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5];
    let mut g = ptr::null_mut();
    let st = unsafe { pc_graph_new(6, us.as_ptr(), vs.as_ptr(), ws.as_ptr(), 7, &mut g) };
    assert_eq!(st, PcStatus::Ok);
    g
}

fn side(cut: *const PcCut) -> Vec<usize> {
    unsafe {
        let mut buf = vec![0usize; pc_cut_side_len(cut)];
        assert_eq!(pc_cut_side(cut, buf.as_mut_ptr(), buf.len()), PcStatus::Ok);
        buf
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(pc_last_error()).to_string_lossy().into_owned() }
}

#[test]
fn exact_oracles_agree() {
    let g = two_triangles();
    unsafe {
        assert_eq!((pc_graph_n(g), pc_graph_m(g)), (6, 7));
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(pc_stoer_wagner(g, &mut a), PcStatus::Ok);
        assert_eq!(pc_brute_force(g, &mut b), PcStatus::Ok);
        assert_eq!(pc_cut_weight(a), 0.5);
        assert_eq!(side(a), vec![0, 1, 2]);
        assert_eq!(side(b), side(a));
        assert!(pc_last_error().is_null());
        pc_cut_free(a);
        pc_cut_free(b);
        pc_graph_free(g);
    }
}

#[test]
fn construction_errors_set_status_and_message() {
    unsafe {
        let mut g = ptr::null_mut();
        let (us, vs, ws) = ([0usize], [0usize], [1.0]);
        assert_eq!(pc_graph_new(3, us.as_ptr(), vs.as_ptr(), ws.as_ptr(), 1, &mut g), PcStatus::InvalidGraph);
        assert!(g.is_null());
        assert!(last_error().contains("self-loop"));
        assert_eq!(pc_graph_new(3, ptr::null(), vs.as_ptr(), ws.as_ptr(), 1, &mut g), PcStatus::NullPointer);
        assert_eq!(pc_graph_new(3, ptr::null(), ptr::null(), ptr::null(), 0, ptr::null_mut()), PcStatus::NullPointer);
    }
}

#[test]
fn disconnected_and_too_large() {
    unsafe {
        let mut g = ptr::null_mut();
        let (us, vs, ws) = ([0usize, 2], [1usize, 3], [1.0, 1.0]);
        assert_eq!(pc_graph_new(4, us.as_ptr(), vs.as_ptr(), ws.as_ptr(), 2, &mut g), PcStatus::Ok);
        let mut c = ptr::null_mut();
        assert_eq!(pc_karger_trial(g, 1, &mut c), PcStatus::Disconnected);
        assert!(c.is_null());
        pc_graph_free(g);

        let us: Vec<usize> = (0..21).collect();
        let vs: Vec<usize> = (1..22).map(|v| v % 21).collect();
        let ws = vec![1.0; 21];
        assert_eq!(pc_graph_new(21, us.as_ptr(), vs.as_ptr(), ws.as_ptr(), 21, &mut g), PcStatus::Ok);
        assert_eq!(pc_brute_force(g, &mut c), PcStatus::TooLarge);
        pc_graph_free(g);
    }
}

#[test]
fn randomized_trials_return_valid_cuts() {
    let g = two_triangles();
    unsafe {
        let pred = pc_prediction_new();
        assert_eq!(pc_prediction_set(pred, 2, 3, 1.0), PcStatus::Ok);
        assert_eq!(pc_prediction_set(pred, 2, 3, 1.5), PcStatus::InvalidPrediction);
        for seed in 0..20 {
            let mut c = ptr::null_mut();
            assert_eq!(pc_karger_trial(g, seed, &mut c), PcStatus::Ok);
            assert!(pc_cut_weight(c) >= 0.5);
            pc_cut_free(c);
            assert_eq!(pc_fpz_trial(g, seed, &mut c), PcStatus::Ok);
            assert!(pc_cut_weight(c) >= 0.5);
            pc_cut_free(c);
            assert_eq!(pc_boosted_karger_trial(g, pred, 6.0, 2, seed, &mut c), PcStatus::Ok);
            pc_cut_free(c);
            assert_eq!(pc_boosted_fpz_trial(g, pred, 2.0, 0.0, 1.0, 5, seed, &mut c), PcStatus::Ok);
            pc_cut_free(c);
        }
        let mut c = ptr::null_mut();
        assert_eq!(pc_boosted_karger_trial(g, ptr::null(), 6.0, 2, 0, &mut c), PcStatus::NullPointer);
        assert_eq!(pc_boosted_fpz_trial(g, pred, 100.0, 0.0, 1.0, 2, 0, &mut c), PcStatus::InvalidArgument);

        let (mut eta, mut rho) = (f64::NAN, f64::NAN);
        assert_eq!(pc_measure(g, pred, &mut eta, &mut rho), PcStatus::Ok);
        assert_eq!((eta, rho), (0.0, 0.0));

        let mut trials = u64::MAX;
        let st = pc_trials_until(g, pred, PcAlgorithm::BoostedKarger, 6.0, 0.0, 1.0, 2, 0.5, 1000, 3, &mut trials);
        assert_eq!(st, PcStatus::Ok);
        assert!((1..=1000).contains(&trials));
        let st = pc_trials_until(g, ptr::null(), PcAlgorithm::Karger, 1.0, 0.0, 1.0, 2, 0.0, 3, 3, &mut trials);
        assert_eq!((st, trials), (PcStatus::Ok, 0));
        let st = pc_trials_until(g, ptr::null(), PcAlgorithm::BoostedFpz, 2.0, 0.0, 1.0, 5, 0.5, 3, 3, &mut trials);
        assert_eq!(st, PcStatus::InvalidArgument);
        pc_prediction_free(pred);
        pc_graph_free(g);
    }
}

#[test]
fn file_io_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let gp = dir.path().join("g.txt");
    let pp = dir.path().join("p.txt");
    std::fs::write(&gp, "4 4\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n").unwrap();
    std::fs::write(&pp, "0 1 1\n2 3 0.5\n").unwrap();
    unsafe {
        let (mut g, mut p) = (ptr::null_mut(), ptr::null_mut());
        let gs = CString::new(gp.to_str().unwrap()).unwrap();
        assert_eq!(pc_graph_read(gs.as_ptr(), &mut g), PcStatus::Ok);
        let ps = CString::new(pp.to_str().unwrap()).unwrap();
        assert_eq!(pc_prediction_read(ps.as_ptr(), 4, &mut p), PcStatus::Ok);
        let (mut eta, mut rho) = (0.0, 0.0);
        assert_eq!(pc_measure(g, p, &mut eta, &mut rho), PcStatus::Ok);
        assert!(eta >= 0.0 && rho >= 0.0);
        let missing = CString::new(dir.path().join("none.txt").to_str().unwrap()).unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(pc_graph_read(missing.as_ptr(), &mut h), PcStatus::Io);
        std::fs::write(&gp, "4 1\n0 x 1\n").unwrap();
        assert_eq!(pc_graph_read(gs.as_ptr(), &mut h), PcStatus::Parse);
        assert!(last_error().contains(":2:"));
        pc_prediction_free(p);
        pc_graph_free(g);
    }
}

#[test]
fn short_side_buffer_is_rejected() {
    let g = two_triangles();
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(pc_stoer_wagner(g, &mut c), PcStatus::Ok);
        let mut buf = [0usize; 2];
        assert_eq!(pc_cut_side(c, buf.as_mut_ptr(), 2), PcStatus::InvalidArgument);
        assert!(pc_cut_weight(ptr::null()).is_nan());
        pc_cut_free(c);
        pc_graph_free(g);
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/predcut.h")).unwrap();
    let source = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20);
    for f in exports {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct PcGraph PcGraph;"));
}

#[test]
fn c_program_links_against_static_library() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    // target/<profile>/deps/<test> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libpredcut_ffi.a");
    assert!(lib.is_file(), "{} not built", lib.display());
    let out = tempfile::tempdir().unwrap();
    let bin = out.path().join("smoke");
    let status = Command::new(&cc)
        .arg(crate_dir().join("tests/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "{stdout}");
    assert!(stdout.contains("weight=0.5 len=3 first=0"), "{stdout}");
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc.to_string());
        }
    }
    Err(())
}
