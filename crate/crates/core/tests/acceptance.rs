use twomat::verify::{run, CRITERIA};

/// Criteria that are known not to hold; each is analysed in the project notes.
const EXPECTED_FAILURES: [usize; 2] = [2, 6];

#[test]
fn acceptance() {
    let mut unexpected = Vec::new();
    for id in 1..=CRITERIA {
        let r = run(id);
        println!("{r}");
        for d in r.details.iter().skip(1) {
            println!("      {d}");
        }
        if r.passed == EXPECTED_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    assert!(unexpected.is_empty(), "criteria with unexpected verdicts: {unexpected:?}");
}
