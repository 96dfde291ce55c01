fn main() {
    println!("ratdeg");
}
