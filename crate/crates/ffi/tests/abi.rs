use std::ffi::CStr;
use std::ptr;

use wopn_ffi::*;

fn last_error() -> String {
    let p = wopn_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

/// Six-cycle with a chord, built through the edge-list constructor.
unsafe fn chorded_cycle() -> *mut WopnNetwork {
    let us = [0usize, 1, 2, 3, 4, 5, 0];
    let vs = [1usize, 2, 3, 4, 5, 0, 3];
    let ws = [1u64, 2, 1, 2, 1, 2, 4];
    let mut net = ptr::null_mut();
    assert_eq!(wopn_network_from_edges(6, us.as_ptr(), vs.as_ptr(), ws.as_ptr(), 7, &mut net), WopnStatus::Ok);
    net
}

#[test]
fn full_pipeline_matches_the_library() {
    unsafe {
        let mut sig = ptr::null_mut();
        assert_eq!(wopn_signal_simulate(c"rossler".as_ptr(), WopnState::Periodic, &mut sig), WopnStatus::Ok);
        let len = wopn_signal_len(sig);
        let mut buf = vec![0.0; len];
        assert_eq!(wopn_signal_copy(sig, buf.as_mut_ptr(), len), WopnStatus::Ok);

        let spec = wopn::dynsys::lookup("rossler").unwrap();
        let lib = wopn::dynsys::simulate_default(&spec, wopn::dynsys::DynamicState::Periodic).unwrap();
        assert_eq!(buf, lib.samples);

        let mut net = ptr::null_mut();
        assert_eq!(wopn_network_from_signal(sig, 6, 50, &mut net), WopnStatus::Ok);
        let a = wopn::experiment::analyze_signal(&lib, 6, 50, &[wopn::graphdist::DistanceMethod::Dd], &[true], 2.0).unwrap();
        assert_eq!(wopn_network_vertex_count(net), a.network.vertex_count());

        let mut dist = ptr::null_mut();
        assert_eq!(wopn_distance_compute(net, WopnMethod::Dd, 0, true, &mut dist), WopnStatus::Ok);
        let n = wopn_distance_size(dist);
        let mut values = vec![0.0; n * n];
        assert_eq!(wopn_distance_copy(dist, values.as_mut_ptr(), values.len()), WopnStatus::Ok);
        assert_eq!(values, a.results[0].distance.values.iter().copied().collect::<Vec<_>>());

        let mut diag = ptr::null_mut();
        assert_eq!(wopn_diagram_compute(dist, &mut diag), WopnStatus::Ok);
        let mut life = 0.0;
        assert_eq!(wopn_diagram_max_lifetime(diag, 1, &mut life), WopnStatus::Ok);
        assert_eq!(life, wopn::persistence::max_lifetime(&a.results[0].diagram, 1));

        let mut self_dist = -1.0;
        assert_eq!(wopn_bottleneck(diag, diag, 1, &mut self_dist), WopnStatus::Ok);
        assert_eq!(self_dist, 0.0);

        wopn_diagram_free(diag);
        wopn_distance_free(dist);
        wopn_network_free(net);
        wopn_signal_free(sig);
    }
}

#[test]
fn diagram_copy_reports_essential_classes() {
    unsafe {
        let net = chorded_cycle();
        let mut dist = ptr::null_mut();
        assert_eq!(wopn_distance_compute(net, WopnMethod::Supd, 0, false, &mut dist), WopnStatus::Ok);
        let mut diag = ptr::null_mut();
        assert_eq!(wopn_diagram_compute(dist, &mut diag), WopnStatus::Ok);
        let k = wopn_diagram_len(diag, 0);
        assert_eq!(k, 6);
        let (mut b, mut d) = (vec![0.0; k], vec![0.0; k]);
        assert_eq!(wopn_diagram_copy(diag, 0, b.as_mut_ptr(), d.as_mut_ptr(), k), WopnStatus::Ok);
        assert_eq!(d.iter().filter(|x| x.is_infinite()).count(), 1);
        assert_eq!(
            wopn_diagram_copy(diag, 0, b.as_mut_ptr(), d.as_mut_ptr(), k - 1),
            WopnStatus::BufferTooSmall
        );
        assert!(last_error().contains("buffer"));
        wopn_diagram_free(diag);
        wopn_distance_free(dist);
        wopn_network_free(net);
    }
}

#[test]
fn matrices_round_trip() {
    unsafe {
        let m = [0.0, 1.0, 2.0, 1.0, 0.0, 1.5, 2.0, 1.5, 0.0];
        let mut dist = ptr::null_mut();
        assert_eq!(wopn_distance_from_matrix(m.as_ptr(), 3, &mut dist), WopnStatus::Ok);
        let mut back = [0.0; 9];
        assert_eq!(wopn_distance_copy(dist, back.as_mut_ptr(), 9), WopnStatus::Ok);
        assert_eq!(back, m);
        wopn_distance_free(dist);

        let asym = [0.0, 1.0, 2.0, 0.0];
        assert_eq!(wopn_distance_from_matrix(asym.as_ptr(), 2, &mut dist), WopnStatus::InvalidInput);
        assert!(last_error().contains("differ"));
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut sig = ptr::null_mut();
        assert_eq!(wopn_signal_simulate(c"nope".as_ptr(), WopnState::Chaotic, &mut sig), WopnStatus::NotFound);
        assert!(last_error().contains("nope"));
        assert!(sig.is_null());

        assert_eq!(wopn_signal_simulate(ptr::null(), WopnState::Chaotic, &mut sig), WopnStatus::NullPointer);
        assert_eq!(wopn_signal_new(ptr::null(), 0, 1.0, ptr::null_mut()), WopnStatus::NullPointer);

        let flat = [1.0; 64];
        assert_eq!(wopn_signal_new(flat.as_ptr(), 64, 1.0, &mut sig), WopnStatus::Ok);
        let mut noisy = ptr::null_mut();
        assert_eq!(wopn_signal_add_noise(sig, 20.0, 0, &mut noisy), WopnStatus::Degenerate);
        let mut net = ptr::null_mut();
        assert_eq!(wopn_network_from_signal(sig, 3, 1, &mut net), WopnStatus::Degenerate);
        assert_eq!(wopn_network_from_signal(sig, 3, 100, &mut net), WopnStatus::Length);
        wopn_signal_free(sig);

        let (us, vs, ws) = ([0usize, 2], [1usize, 3], [1u64, 1]);
        assert_eq!(wopn_network_from_edges(4, us.as_ptr(), vs.as_ptr(), ws.as_ptr(), 2, &mut net), WopnStatus::Ok);
        let mut dist = ptr::null_mut();
        assert_eq!(wopn_distance_compute(net, WopnMethod::Supd, 0, false, &mut dist), WopnStatus::Disconnected);
        wopn_network_free(net);

        // A successful call clears the previous message.
        assert!(!wopn_version().is_null());
        assert_eq!(wopn_signal_new(flat.as_ptr(), 64, 1.0, &mut sig), WopnStatus::Ok);
        assert!(wopn_last_error().is_null());
        wopn_signal_free(sig);

        wopn_signal_free(ptr::null_mut());
        assert_eq!(wopn_signal_len(ptr::null()), 0);
    }
}
