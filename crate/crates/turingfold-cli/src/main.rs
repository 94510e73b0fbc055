fn main() {
    println!("tfold placeholder");
}
