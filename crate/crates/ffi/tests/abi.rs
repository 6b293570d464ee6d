//! Exercises the C ABI through its Rust signatures and the generated header.

use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use motional_qec_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = mqec_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn small_demo() -> *mut MqecPreset {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(mqec_preset_load(c("demo").as_ptr(), &mut p), MqecStatus::Ok);
        for a in ["protocol.cycles=3", "protocol.trajectories=30", "seed=9"] {
            assert_eq!(
                mqec_preset_set(p, c(a).as_ptr()),
                MqecStatus::Ok,
                "{a}: {}",
                last_error()
            );
        }
    }
    p
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(mqec_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn protocol_round_trip() {
    let preset = small_demo();
    let mut failed = usize::MAX;
    unsafe {
        assert_eq!(mqec_verify(preset, &mut failed), MqecStatus::Ok);
        assert_eq!(failed, 0);

        let mut proto = ptr::null_mut();
        assert_eq!(mqec_protocol_new(preset, &mut proto), MqecStatus::Ok);
        let mut run = ptr::null_mut();
        assert_eq!(mqec_protocol_run(proto, &mut run), MqecStatus::Ok);

        let mut n = 0;
        assert_eq!(mqec_run_cycle_count(run, &mut n), MqecStatus::Ok);
        assert_eq!(n, 3);
        let mut cyc = MqecCycle::default();
        assert_eq!(mqec_run_cycle(run, 0, &mut cyc), MqecStatus::Ok);
        assert_eq!(cyc.cycle, 1);
        assert!(cyc.mean_fidelity > 0.5 && cyc.mean_fidelity <= 1.0 + 1e-12);
        assert_eq!(mqec_run_cycle(run, 3, &mut cyc), MqecStatus::OutOfRange);
        assert!(last_error().contains("cycle 3"));

        let (mut pf, mut se) = (0.0, 0.0);
        assert_eq!(mqec_run_failure(run, &mut pf, &mut se), MqecStatus::Ok);
        assert!((0.0..=1.0).contains(&pf) && se >= 0.0);

        let mut needed = 0;
        assert_eq!(
            mqec_run_to_json(run, ptr::null_mut(), 0, &mut needed),
            MqecStatus::BufferTooSmall
        );
        let mut buf = vec![0 as c_char; needed];
        assert_eq!(
            mqec_run_to_json(run, buf.as_mut_ptr(), buf.len(), &mut needed),
            MqecStatus::Ok
        );
        let text = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        let v: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(v["cycles"].as_array().unwrap().len(), 3);

        let mut fj = MqecForcedJump::default();
        assert_eq!(
            mqec_protocol_forced_jump(proto, 0.6, 0.0, 0.0, 0.8, MqecAxis::Y, 0.02, &mut fj),
            MqecStatus::Ok
        );
        assert!(fj.mean_fidelity > 1.0 - 1e-8, "{fj:?}");
        assert!(fj.flagged_probability > 1.0 - 1e-8);

        let mut f = MqecFailure::default();
        assert_eq!(
            mqec_protocol_cycle_failure(proto, 500, 3, &mut f),
            MqecStatus::Ok
        );
        assert!((f.gamma_tau - 0.05).abs() < 1e-12);
        assert!((f.probability - f.double_jump_exact).abs() < 5.0 * f.std_error + 1e-4);

        mqec_run_free(run);
        mqec_protocol_free(proto);
        mqec_preset_free(preset);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(
            mqec_preset_load(c("missing-preset").as_ptr(), &mut p),
            MqecStatus::Config
        );
        assert!(p.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(
            mqec_preset_load(ptr::null(), &mut p),
            MqecStatus::NullPointer
        );
        assert_eq!(
            mqec_preset_from_json(c("{not json").as_ptr(), &mut p),
            MqecStatus::Config
        );

        let preset = small_demo();
        assert_eq!(
            mqec_preset_set(preset, c("protocol.bogus=1").as_ptr()),
            MqecStatus::Config
        );
        assert_eq!(
            mqec_preset_set(preset, c("protocol.n_bar=0.3").as_ptr()),
            MqecStatus::Ok
        );
        let mut proto = ptr::null_mut();
        assert_eq!(
            mqec_protocol_new(preset, &mut proto),
            MqecStatus::Unsupported
        );
        assert!(last_error().contains("n_bar"));

        let mut ok = ptr::null_mut();
        assert_eq!(
            mqec_preset_load(c("demo").as_ptr(), &mut ok),
            MqecStatus::Ok
        );
        assert!(mqec_last_error().is_null());
        let mut proto = ptr::null_mut();
        assert_eq!(mqec_protocol_new(ok, &mut proto), MqecStatus::Ok);
        let mut fj = MqecForcedJump::default();
        assert_eq!(
            mqec_protocol_forced_jump(proto, 0.0, 0.0, 0.0, 0.0, MqecAxis::X, 0.01, &mut fj),
            MqecStatus::InvalidParameter
        );
        assert_eq!(
            mqec_protocol_forced_jump(proto, 1.0, 0.0, 0.0, 0.0, MqecAxis::X, 1.0, &mut fj),
            MqecStatus::InvalidParameter
        );

        mqec_protocol_free(proto);
        mqec_preset_free(ok);
        mqec_preset_free(preset);
        mqec_preset_free(ptr::null_mut());
    }
}

#[test]
fn preset_json_round_trips() {
    unsafe {
        let preset = small_demo();
        let mut needed = 0;
        mqec_preset_to_json(preset, ptr::null_mut(), 0, &mut needed);
        let mut buf = vec![0 as c_char; needed];
        assert_eq!(
            mqec_preset_to_json(preset, buf.as_mut_ptr(), needed, ptr::null_mut()),
            MqecStatus::Ok
        );
        let mut copy = ptr::null_mut();
        assert_eq!(
            mqec_preset_from_json(buf.as_ptr(), &mut copy),
            MqecStatus::Ok
        );
        let mut again = vec![0 as c_char; needed];
        assert_eq!(
            mqec_preset_to_json(copy, again.as_mut_ptr(), needed, ptr::null_mut()),
            MqecStatus::Ok
        );
        assert_eq!(buf, again);
        mqec_preset_free(copy);
        mqec_preset_free(preset);
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/motional_qec.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "mqec_preset_load",
        "mqec_protocol_run",
        "mqec_run_cycle",
        "mqec_last_error",
        "MQEC_STATUS_OK",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let src = std::env::temp_dir().join(format!("mqec_header_{}.c", std::process::id()));
    std::fs::write(
        &src,
        "#include \"motional_qec.h\"\nint main(void) { MqecPreset *p = 0; \
         return mqec_preset_load(\"demo\", &p) == MQEC_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .status()
    else {
        eprintln!("no C compiler on PATH; header syntax not checked");
        return;
    };
    std::fs::remove_file(&src).ok();
    assert!(status.success());
}
