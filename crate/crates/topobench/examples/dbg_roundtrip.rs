use topobench::generate::{gen_triangle_pool, TriangleGenParams};
use topobench::io::{read_dataset, write_dataset};

fn main() {
    let dir = std::env::temp_dir().join("tb-dbg");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("pool.jsonl");
    let items = gen_triangle_pool(12, 100, &TriangleGenParams::default()).unwrap();
    write_dataset(&path, &items).unwrap();
    let back = read_dataset(&path).unwrap();
    for (a, b) in items.iter().zip(&back) {
        if a != b {
            println!("id {} differs", a.id);
            if a.graph != b.graph { println!("  graph differs: {:?}\n  vs {:?}", a.graph, b.graph); }
            if a.provenance != b.provenance { println!("  prov: {:?}\n  vs   {:?}", a.provenance, b.provenance); }
            if a.label != b.label { println!("  label {} vs {}", a.label, b.label); }
            break;
        }
    }
    println!("done");
}
