fn main() {
    println!("inflectus");
}
