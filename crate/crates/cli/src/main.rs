fn main() {
    println!("wadaflow");
}
