use flagiso::acceptance::{run, CRITERIA};

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let report = run(id);
        println!("{report}");
        if !report.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
