use sci_core::{bounds::Bounds, syntax::parse_type, universal::*};
use std::time::Instant;
fn main() {
    let b = Bounds::new(1, 2, 2);
    for s in ["comm", "nat", "var", "comm -o comm", "nat -o nat", "var -o comm", "(comm -o comm) -o comm"] {
        let t = parse_type(s).unwrap();
        let i = Instant::now();
        println!("{s}: max_code {:?}", max_code(&t, &b));
        let r = retraction_by_composition(&t, &b);
        match r {
            Ok(r) => println!("{s}: {} {:?}", r.len(), i.elapsed()),
            Err(e) => println!("{s}: err {e} {:?}", i.elapsed()),
        }
    }
}
