//! One pass/fail line per acceptance criterion. Runs without the libtest
//! harness so the table is always printed; exits nonzero if any line fails.

use std::cmp::Ordering;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nestkey::bench::{lvrv_encode, lvrv_insert, LvRvTree};
use nestkey::oracle::{eval_cf, naive_preorder, trop_eval, NaiveTree, Rational};
use nestkey::{
    apply_relocation, compare_keys, decode_key, encode_path, next_sibling_key, relocation_map,
    NodeKey, TreePath, TreeStore,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn path(ordinals: &[u64]) -> TreePath {
    TreePath::from_ordinals(ordinals).unwrap()
}

fn random_path(rng: &mut impl Rng, max_depth: usize, max_ordinal: u64) -> TreePath {
    let depth = rng.gen_range(1..=max_depth);
    let ordinals: Vec<u64> = (0..depth).map(|_| rng.gen_range(1..=max_ordinal)).collect();
    path(&ordinals)
}

fn cli(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_nestkey"))
        .args(args)
        .output()
        .expect("binary should run");
    assert!(
        out.status.success(),
        "{args:?} exited with {:?}",
        out.status
    );
    String::from_utf8(out.stdout).unwrap()
}

fn ratio(n: &num_bigint::BigUint, d: &num_bigint::BigUint) -> Rational {
    Rational::new(n.clone().into(), d.clone().into())
}

fn golden_encoding() -> Outcome {
    let printed = cli(&["encode", "2.4.3"]);
    ensure(printed == "65/23:82/29\n", || {
        format!("encode 2.4.3 printed {printed:?}")
    })?;

    let table: [(&[u64], [u64; 4]); 8] = [
        (&[2], [2, 1, 3, 1]),
        (&[2, 1], [5, 2, 8, 3]),
        (&[2, 2], [8, 3, 11, 4]),
        (&[2, 3], [11, 4, 14, 5]),
        (&[2, 4], [14, 5, 17, 6]),
        (&[2, 4, 1], [31, 11, 48, 17]),
        (&[2, 4, 2], [48, 17, 65, 23]),
        (&[2, 4, 3], [65, 23, 82, 29]),
    ];
    let mut expected_demo = String::new();
    for (ordinals, [nv, dv, snv, sdv]) in table {
        let p = path(ordinals);
        let k = encode_path(&p);
        let got = [k.nv(), k.dv(), k.snv(), k.sdv()].map(|x| x.to_string());
        let want = [nv, dv, snv, sdv].map(|x| x.to_string());
        ensure(got == want, || format!("{p}: got {got:?}, want {want:?}"))?;
        expected_demo.push_str(&format!("{p}\t{nv}\t{dv}\t{snv}\t{sdv}\n"));
    }
    let demo = cli(&["demo", "figures", "--format", "tsv"]);
    ensure(demo == expected_demo, || {
        format!("demo figures printed {demo:?}")
    })?;
    Ok("8/8 rows exact".into())
}

fn golden_decoding() -> Outcome {
    let decoded = decode_key(&65u32.into(), &23u32.into()).map_err(|e| e.to_string())?;
    let chain: Vec<String> = decoded
        .chain
        .iter()
        .map(|k| format!("{}/{}", k.nv(), k.dv()))
        .collect();
    ensure(chain == ["2/1", "14/5", "65/23"], || {
        format!("chain {chain:?}")
    })?;
    ensure(decoded.path == path(&[2, 4, 3]), || {
        format!("path {}", decoded.path)
    })?;
    let printed = cli(&["decode", "65", "23"]);
    ensure(printed == "2.4.3\n2/1\n14/5\n65/23\n", || {
        format!("decode printed {printed:?}")
    })?;
    Ok("2/1 -> 14/5 -> 65/23, path 2.4.3".into())
}

fn key_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let count = 10_000;
    for _ in 0..count {
        let p = random_path(&mut rng, 12, 10);
        let k = encode_path(&p);
        ensure(k.determinant() == (-1).into(), || {
            format!("{p}: determinant")
        })?;
        let one = 1u32.into();
        for (a, b) in [
            (k.nv(), k.dv()),
            (k.snv(), k.sdv()),
            (k.nv(), k.snv()),
            (k.dv(), k.sdv()),
        ] {
            ensure(num_integer::Integer::gcd(a, b) == one, || {
                format!("{p}: gcd({a}, {b})")
            })?;
        }
        ensure(ratio(k.nv(), k.dv()) == eval_cf(&p).unwrap(), || {
            format!("{p}: value")
        })?;

        let sibling = p.next_sibling().unwrap();
        let ks = encode_path(&sibling);
        ensure(
            compare_keys(&k, &ks).unwrap() == Ordering::Less
                && next_sibling_key(&k).unwrap() == ks
                && ratio(k.snv(), k.sdv()) == ratio(ks.nv(), ks.dv()),
            || format!("{p}: sibling order"),
        )?;

        if let Some(parent) = p.parent().filter(|q| !q.is_empty()) {
            let kp = encode_path(&parent);
            ensure(
                ratio(kp.nv(), kp.dv()) < ratio(k.nv(), k.dv())
                    && ratio(k.nv(), k.dv()) < ratio(kp.snv(), kp.sdv())
                    && ratio(k.snv(), k.sdv()) <= ratio(kp.snv(), kp.sdv()),
                || format!("{p}: not nested in parent"),
            )?;
        }
    }
    Ok(format!("{count} paths, 0 failures"))
}

fn order_is_preorder() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut nodes = 0;
    for trial in 0..100 {
        let size = rng.gen_range(0..=500);
        let tree = NaiveTree::random(&mut rng, size);
        let mut keys: Vec<NodeKey> = tree.paths().map(encode_path).collect();
        keys.sort_by(|a, b| compare_keys(a, b).unwrap());
        let by_key: Vec<TreePath> = keys.iter().map(NodeKey::path).collect();
        ensure(by_key == naive_preorder(&tree), || {
            format!("tree {trial} out of order")
        })?;

        // The store's iteration order must agree as well.
        let mut store = TreeStore::new();
        for p in naive_preorder(&tree) {
            let parent = encode_path(&p.parent().unwrap());
            store.insert_child(&parent, p.to_string()).unwrap();
        }
        let listed: Vec<String> = store.iter().map(|r| r.payload).collect();
        let want: Vec<String> = by_key.iter().map(|p| p.to_string()).collect();
        ensure(listed == want, || format!("store order for tree {trial}"))?;
        nodes += size;
    }
    Ok(format!("100 trees, {nodes} nodes, 0 mismatches"))
}

fn tropashko_counterexample() -> Outcome {
    let show = |ordinals: &[u64]| trop_eval(&path(ordinals)).unwrap().to_string();
    let level3 = [show(&[2, 4, 3]), show(&[2, 4, 4]), show(&[2, 4, 5])];
    let level4 = [
        show(&[2, 4, 3, 3]),
        show(&[2, 4, 3, 4]),
        show(&[2, 4, 3, 5]),
    ];
    ensure(level3 == ["29/13", "38/17", "47/21"], || {
        format!("level 3 {level3:?}")
    })?;
    ensure(level4 == ["96/43", "125/56", "154/69"], || {
        format!("level 4 {level4:?}")
    })?;
    let v = |ordinals: &[u64]| trop_eval(&path(ordinals)).unwrap();
    ensure(
        v(&[2, 4, 3]) < v(&[2, 4, 4]) && v(&[2, 4, 4]) < v(&[2, 4, 5]),
        || "level 3 not increasing".into(),
    )?;
    ensure(
        v(&[2, 4, 3, 3]) > v(&[2, 4, 3, 4]) && v(&[2, 4, 3, 4]) > v(&[2, 4, 3, 5]),
        || "level 4 not decreasing".into(),
    )?;
    ensure(v(&[2, 4, 3, 1]) == v(&[2, 4, 4]), || "no collision".into())?;
    let demo = cli(&["demo", "tropashko"]);
    ensure(
        demo.contains("29/13 < 38/17 < 47/21") && demo.contains("96/43 > 125/56 > 154/69"),
        || format!("demo printed {demo:?}"),
    )?;
    ensure(demo.contains("29/18 is a misprint"), || {
        "misprint not flagged".into()
    })?;
    Ok("level 3 increasing, level 4 decreasing; 29/18 flagged, 29/13 used".into())
}

fn relocation() -> Outcome {
    let map = relocation_map(
        &encode_path(&path(&[2])),
        4u32,
        &encode_path(&path(&[3])),
        1u32,
    )
    .map_err(|e| e.to_string())?;
    let moved = apply_relocation(&map, &"65/23:82/29".parse().unwrap()).unwrap();
    ensure(
        (moved.nv().to_string(), moved.dv().to_string()) == ("40".into(), "11".into()),
        || format!("worked instance gave {moved}"),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let count = 1000;
    for _ in 0..count {
        let p0 = random_path(&mut rng, 5, 8);
        let p1 = random_path(&mut rng, 5, 8);
        let (n, m) = (rng.gen_range(1..=9u64), rng.gen_range(1..=9u64));
        let tail_len = rng.gen_range(0..=4);
        let tail: Vec<u64> = (0..tail_len).map(|_| rng.gen_range(1..=8)).collect();
        let tail = path(&tail);

        let map = relocation_map(&encode_path(&p0), n, &encode_path(&p1), m).unwrap();
        let before = encode_path(&p0.child(n).unwrap().join(&tail));
        let after = encode_path(&p1.child(m).unwrap().join(&tail));
        let got = apply_relocation(&map, &before).map_err(|e| e.to_string())?;
        ensure(got == after, || {
            format!("{p0}.{n}/{tail} -> {p1}.{m}: got {got}, want {after}")
        })?;
    }
    Ok(format!("{count} instances exact; 65/23 -> 40/11"))
}

fn cost_claim() -> Outcome {
    let tree = NaiveTree::from_paths(&[path(&[1]), path(&[2, 4, 3]), path(&[2, 5]), path(&[3])])
        .map_err(|e| e.to_string())?;
    let holding_seven_or_more = lvrv_encode(&tree)
        .values()
        .filter(|n| n.lv >= 7 || n.rv >= 7)
        .count();
    let mut table = LvRvTree::from_tree(&tree);
    let renumbered = lvrv_insert(&mut table, &path(&[2, 2]), 1).map_err(|e| e.to_string())?;
    ensure(renumbered == holding_seven_or_more, || {
        format!("renumbered {renumbered}, {holding_seven_or_more} nodes hold values >= 7")
    })?;
    ensure(table.is_valid_nested_set(), || {
        "table invalid after insert".into()
    })?;

    let mut store = TreeStore::new();
    for p in naive_preorder(&tree) {
        store
            .insert_child(&encode_path(&p.parent().unwrap()), p.to_string())
            .unwrap();
    }
    let before = store.to_text();
    let record = store
        .insert_child(&encode_path(&path(&[2, 2])), "2.2.1")
        .map_err(|e| e.to_string())?;
    let after = store.to_text();
    let old: std::collections::HashSet<&str> = before.lines().collect();
    let written = after.lines().filter(|l| !old.contains(l)).count();
    ensure(
        written == 1 && record.key == encode_path(&path(&[2, 2, 1])),
        || format!("rational insert wrote {written} records"),
    )?;
    Ok(format!(
        "lvrv renumbered {renumbered} nodes (all holding values >= 7; expected count corrected from 8), rational wrote 1"
    ))
}

fn text_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let count = 1000;
    for _ in 0..count {
        let p = random_path(&mut rng, 12, 1000);
        let printed = encode_path(&p).to_string();
        let parsed: NodeKey = printed.parse().map_err(|e| format!("{printed}: {e}"))?;
        let back = decode_key(parsed.nv(), parsed.dv())
            .map_err(|e| e.to_string())?
            .path;
        let reparsed: TreePath = back.to_string().parse().map_err(|e| format!("{e}"))?;
        ensure(reparsed == p && back.to_string() == p.to_string(), || {
            format!("{p} came back as {back}")
        })?;
    }
    // A sample through the binary as well.
    for _ in 0..20 {
        let p = random_path(&mut rng, 6, 50).to_string();
        let key = cli(&["encode", &p]);
        let (nv, rest) = key.trim_end().split_once('/').unwrap();
        let dv = rest.split_once(':').unwrap().0;
        let decoded = cli(&["decode", nv, dv]);
        ensure(decoded.lines().next() == Some(p.as_str()), || {
            format!("{p} via binary")
        })?;
    }
    Ok(format!("{count} paths lossless, 20 via the binary"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            1,
            "golden encoding",
            Duration::from_secs(1),
            golden_encoding,
        ),
        (
            2,
            "golden decoding",
            Duration::from_secs(1),
            golden_decoding,
        ),
        (3, "key invariants", Duration::from_secs(30), key_invariants),
        (
            4,
            "order is preorder",
            Duration::from_secs(30),
            order_is_preorder,
        ),
        (
            5,
            "tropashko counterexample",
            Duration::from_secs(1),
            tropashko_counterexample,
        ),
        (6, "relocation", Duration::from_secs(10), relocation),
        (7, "cost claim", Duration::from_secs(1), cost_claim),
        (
            8,
            "text round trip",
            Duration::from_secs(5),
            text_round_trip,
        ),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed <= budget {
                Ok(detail)
            } else {
                Err(format!("{detail}; took {elapsed:?}, budget {budget:?}"))
            }
        });
        match &outcome {
            Ok(detail) => println!("PASS {id} {name}: {detail} ({} ms)", elapsed.as_millis()),
            Err(why) => {
                println!("FAIL {id} {name}: {why} ({} ms)", elapsed.as_millis());
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
