fn main() {
    let code = quizforge::cli::run_main();
    std::process::exit(code);
}
