use fillnorm_web::{fill_rectangle, fv_table_json, gersten};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn rectangle_fillings_are_areas() {
    for (w, h) in [(1, 1), (2, 1), (2, 2), (3, 2), (3, 3)] {
        let v = parse(&fill_rectangle(w, h));
        assert_eq!(v["filling"]["value"], (w * h) as u64, "{w}x{h}");
        assert_eq!(v["filling"]["boundary_norm"], 2 * (w + h) as u64);
        assert_eq!(v["filling"]["witness"].as_array().unwrap().len(), (w * h) as usize);
    }
    assert!(parse(&fill_rectangle(0, 2))["error"].is_string());
    assert!(parse(&fill_rectangle(5, 1))["error"].is_string());
}

#[test]
fn plane_table() {
    let v = parse(&fv_table_json("z2-torus", 1, 8, 4));
    let values: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["value"].as_u64().unwrap()).collect();
    assert_eq!(values, vec![0, 0, 0, 1, 1, 2, 2, 4]);
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["status"] == "exact" && r["ms"] == 0));
    assert!(parse(&fv_table_json("gersten(2)", 1, 4, 2))["error"].is_string());
    assert!(parse(&fv_table_json("z2-torus", 1, 9, 4))["error"].is_string());
}

#[test]
fn gersten_multiples() {
    for k in [2u32, 3] {
        let v = parse(&gersten(k));
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 2 * k as usize);
        assert_eq!(rows[1]["value"], 1);
        assert_eq!(rows[2 * k as usize - 1]["value"], 1);
        assert!(rows.iter().filter(|r| r["multiple"].as_i64().unwrap() % 2 == 1).all(|r| r["value"].is_null()));
        assert_eq!(v["not_regular"], true);
    }
    assert!(parse(&gersten(1))["error"].is_string());
}
