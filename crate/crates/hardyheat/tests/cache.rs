use std::fs::OpenOptions;
use std::io::Write;
use std::thread;

use hardyheat::cache::{eval_key, Cache};
use hardyheat_core::{AccuracyBudget, EvalResult, Method};

fn result(i: usize) -> EvalResult {
    EvalResult {
        value: 1.0 / (i as f64 + 1.0),
        err_est: 1e-12,
        method: Method::Subordination,
    }
}

fn key(writer: usize, i: usize) -> String {
    eval_key("free", 1.0, 0.5, 0.0, 1.0, writer as f64, i as f64, "subordination")
}

#[test]
fn concurrent_writers_leave_a_valid_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache");
    let (writers, per_writer) = (8, 50);
    let handles: Vec<_> = (0..writers)
        .map(|w| {
            let path = path.clone();
            thread::spawn(move || {
                let mut c = Cache::open(&path).unwrap();
                for i in 0..per_writer {
                    c.put_eval(&key(w, i), AccuracyBudget::default(), result(i)).unwrap();
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    let mut c = Cache::open(&path).unwrap();
    let stats = c.stats();
    assert_eq!(stats.records, writers * per_writer);
    assert_eq!(stats.corrupt, 0);
    for w in 0..writers {
        for i in 0..per_writer {
            assert_eq!(c.get_eval(&key(w, i), &AccuracyBudget::default()), Some(result(i)));
        }
    }
}

#[test]
fn corrupted_records_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache");
    {
        let mut c = Cache::open(&path).unwrap();
        for i in 0..3 {
            c.put_eval(&key(0, i), AccuracyBudget::default(), result(i)).unwrap();
        }
    }
    // flip one byte inside the second record's JSON
    let mut bytes = std::fs::read(&path).unwrap();
    let second = bytes.iter().position(|&b| b == b'\n').unwrap() + 1;
    let pos = second + 40;
    bytes[pos] = if bytes[pos] == b'1' { b'2' } else { b'1' };
    std::fs::write(&path, &bytes).unwrap();
    // garbage and a torn record at the end
    let mut f = OpenOptions::new().append(true).open(&path).unwrap();
    f.write_all(b"not a record\n").unwrap();
    f.write_all(&bytes[..second - 5]).unwrap();
    drop(f);

    let mut c = Cache::open(&path).unwrap();
    let stats = c.stats();
    assert_eq!(stats.records, 2);
    assert_eq!(stats.corrupt, 3);
    let b = AccuracyBudget::default();
    assert_eq!(c.get_eval(&key(0, 0), &b), Some(result(0)));
    assert_eq!(c.get_eval(&key(0, 1), &b), None);
    assert_eq!(c.get_eval(&key(0, 2), &b), Some(result(2)));

    // new appends after the torn tail are still readable
    c.put_eval(&key(0, 9), b, result(9)).unwrap();
    let mut again = Cache::open(&path).unwrap();
    assert_eq!(again.get_eval(&key(0, 9), &b), Some(result(9)));
}

#[test]
fn tighter_budgets_miss_and_clear_empties() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache");
    let mut c = Cache::open(&path).unwrap();
    c.put_eval("k", AccuracyBudget::default(), result(0)).unwrap();
    let tight = AccuracyBudget {
        rel_tol: 1e-12,
        ..Default::default()
    };
    assert_eq!(c.get_eval("k", &tight), None);
    assert_eq!(c.get_eval("k", &AccuracyBudget::default()), Some(result(0)));
    Cache::clear(&path).unwrap();
    assert_eq!(Cache::open(&path).unwrap().stats().records, 0);
}
