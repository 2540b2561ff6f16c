mod common;

use meshplan::ingest::{
    read_raw_pathloss, read_roster, symmetrize, write_matrix_csv, IngestError, NodeRoster,
    RawPathLoss,
};
use meshplan::matrix::Matrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("n{i}")).collect()
}

fn csv_in_order(names: &[String], m: &Matrix<f64>, order: &[usize]) -> String {
    let mut out = String::from("id");
    for &p in order {
        out += &format!(",{}", names[p]);
    }
    out.push('\n');
    for &r in order {
        out += &names[r];
        for &c in order {
            let v = m[(r, c)];
            if v.is_infinite() {
                out += ",NA";
            } else {
                out += &format!(",{v}");
            }
        }
        out.push('\n');
    }
    out
}

#[test]
fn file_order_does_not_matter() {
    let mut rng = common::rng(1);
    for _ in 0..30 {
        let n = 6;
        let names = ids(n);
        let roster = NodeRoster::from_ids(&names).unwrap();
        let m = common::random_raw(&mut rng, n, 0.2);
        let identity: Vec<usize> = (0..n).collect();
        let mut shuffled = identity.clone();
        shuffled.shuffle(&mut rng);
        let a = read_raw_pathloss::<f64, _>(csv_in_order(&names, &m, &identity).as_bytes(), &roster)
            .unwrap();
        let b = read_raw_pathloss::<f64, _>(csv_in_order(&names, &m, &shuffled).as_bytes(), &roster)
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values, m);
    }
}

#[test]
fn write_then_read_round_trips() {
    let mut rng = common::rng(2);
    let names = ids(9);
    let roster = NodeRoster::from_ids(&names).unwrap();
    let m = common::random_raw(&mut rng, 9, 0.3);
    let mut buf = Vec::new();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    write_matrix_csv(&mut buf, &refs, &m, |v: f64| format!("{v:e}")).unwrap();
    let back = read_raw_pathloss::<f64, _>(buf.as_slice(), &roster).unwrap();
    assert_eq!(back.values, m);
}

#[test]
fn roster_errors_carry_line_numbers() {
    let dup = "id,lat,lon,elev_m\na,1,2,3\nb,,,\na,0,0,0\n";
    assert!(matches!(
        read_roster(dup.as_bytes()),
        Err(IngestError::DuplicateId { line: 4, .. })
    ));
    let bad = "id,lat,lon,elev_m\na,1,2,3\nb,north,2,3\n";
    assert!(matches!(
        read_roster(bad.as_bytes()),
        Err(IngestError::NonNumeric { line: 3, .. })
    ));
    assert!(matches!(
        read_roster("id,lat,lon,elev_m\n".as_bytes()),
        Err(IngestError::EmptyRoster)
    ));
}

#[test]
fn matrix_rejections() {
    let roster = NodeRoster::from_ids(&["a", "b"]).unwrap();
    let cases = [
        "id,a,b\na,0,1\nb,1,x\n",
        "id,a,b\na,0,1\nb,1,NaN\n",
        "id,a,b\na,0,1\nb,1,-3\n",
        "id,a,c\na,0,1\nc,1,0\n",
        "id,a,b\na,0,1\n",
        "id,a,b\na,0,1\nb,1\n",
    ];
    for text in cases {
        assert!(
            read_raw_pathloss::<f64, _>(text.as_bytes(), &roster).is_err(),
            "accepted {text:?}"
        );
    }
}

proptest! {
    #[test]
    fn symmetrize_is_max_of_pair(
        cells in prop::collection::vec(prop_oneof![9 => 0.0..300.0f64, 1 => Just(f64::INFINITY)], 1..=64)
    ) {
        let n = (cells.len() as f64).sqrt() as usize;
        let m = Matrix::from_fn(n, n, |i, j| cells[i * n + j]);
        let pl = symmetrize(&RawPathLoss { values: m.clone() });
        prop_assert!(pl.values().is_symmetric());
        for i in 0..n {
            prop_assert_eq!(pl.get(i, i), 0.0);
            for j in 0..n {
                if i != j {
                    prop_assert!(pl.get(i, j) >= m[(i, j)] && pl.get(i, j) >= m[(j, i)]);
                    prop_assert!(pl.get(i, j) == m[(i, j)] || pl.get(i, j) == m[(j, i)]);
                }
            }
        }
    }
}
