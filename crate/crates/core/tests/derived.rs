use std::collections::BTreeMap;

use flagiso::derived::{derived_values, mismatches};
use serde_json::{json, Value};

fn lock() -> BTreeMap<String, Value> {
    serde_json::from_str(include_str!("../../../derived_values.json")).unwrap()
}

#[test]
fn current_outputs_match_the_lockfile() {
    let current = derived_values().unwrap();
    assert_eq!(mismatches(&current, &lock()), Vec::<String>::new());
}

#[test]
fn pinned_values_agree_with_their_oracles() {
    let v = lock();
    let get = |k: &str| v.get(k).unwrap_or_else(|| panic!("missing {k}"));

    assert_eq!(get("order.normalize")["normalized"], "seq[1] + omega(2)");
    assert_eq!(get("order.normalize")["oracle_agrees"], true);
    assert_eq!(get("order.is_isomorphic")["verdict"], get("order.is_isomorphic")["oracle"]);
    assert_eq!(get("order.truncate")["blocks"], json!([2, 2, 1]));
    assert_eq!(get("order.truncate")["blocks"], get("order.truncate")["hand"]);

    assert_eq!(get("flag.truncate.symplectic")["variety"], "C(1; 8)");
    assert_eq!(get("flag.truncate.orthogonal")["variety"], "B(2; 5)");

    let a = get("counting.poincare.A(2; 4)");
    assert_eq!(a["polynomial"], "1 + q + 2*q^2 + q^3 + q^4");
    assert_eq!((a["brute_2"].clone(), a["brute_3"].clone()), (json!(35), json!(130)));
    let bd = get("counting.poincare.B(2; 5)~D(3; 6)");
    assert_eq!(bd["B"], bd["D"]);
    assert_eq!(bd["brute_B_3"], bd["brute_D_3"]);
    assert_eq!(get("counting.points.B(2; 5).q=2"), &json!(15));
    for k in ["counting.points.B(2; 5).q=3", "counting.points.A(1,3; 4).q=2", "counting.points.D(2; 4).q=2"] {
        assert_eq!(get(k)["brute"], get(k)["weyl"], "{k}");
    }
    assert_eq!(get("counting.points.A(1,3; 4).q=2")["brute"], 105);
    assert_eq!(get("counting.points.D(2; 4).q=2")["brute"], 3);
    assert_eq!(get("counting.dim.A(1,2; 3)")["weyl"], get("counting.dim.A(1,2; 3)")["longest_s3"]);
    assert_eq!(get("counting.dim.C(1; 4)")["weyl"], get("counting.dim.C(1; 4)")["interpolated_degree"]);

    assert_eq!(get("witness.rebase.symplectic")["passed"], true);
    assert_eq!(get("witness.modified_extension"), &json!({ "dims": [2], "is_annihilator": true }));
    assert_eq!(get("witness.isotropic_extension"), &json!({ "dims": [1, 2], "isotropic": true }));
    assert_eq!(get("witness.bd_phi.n=2")["lagrangians_containing"], 2);
    assert_eq!(get("witness.bd_phi.n=2")["lagrangian"], true);
    assert_eq!(get("witness.bd_phi.reference"), &json!(true));
    let b = get("witness.bd_bijection.F3.n=2");
    assert_eq!(b["bijective"], true);
    assert_eq!(b["domain"], b["family"]);
    for k in ["witness.bd_squares.F2.n=2", "witness.bd_squares.F2.n=3", "witness.bd_squares.F5.n=4"] {
        assert_eq!(get(k)["failures"], 0, "{k}");
    }
    assert_eq!(get("witness.bd_squares.F5.n=4")["checked"], 100);
    assert_eq!(get("linalg.perp.symplectic6"), &json!({ "dim": 4, "double_perp": true }));
}
