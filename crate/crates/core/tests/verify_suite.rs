use khessian::verify::{run_inequality_suite, SampleSpec};

#[test]
fn three_two_suite_is_clean() {
    let r = run_inequality_suite(&SampleSpec::new(3, 2, 100_000, 1).unwrap()).unwrap();
    assert_eq!(r.total_violations(), 0, "{}", r.summary());
    assert!(r.quad_split_max_witness <= r.quad_split_bound);
}

#[test]
fn monge_ampere_cone_suite_is_clean() {
    for n in 1..=6 {
        let r = run_inequality_suite(&SampleSpec::new(n, n, 10_000, 2).unwrap()).unwrap();
        assert_eq!(r.total_violations(), 0, "{}", r.summary());
    }
}

#[test]
fn csv_is_byte_identical_across_runs() {
    let spec = SampleSpec::new(5, 3, 9000, 42).unwrap();
    let mut a = Vec::new();
    let mut b = Vec::new();
    run_inequality_suite(&spec).unwrap().write_csv(&mut a, true).unwrap();
    run_inequality_suite(&spec).unwrap().write_csv(&mut b, true).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 8);
}
