fn main() {
    // dying quietly on a closed pipe beats a panic from println!
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(chasecheck::cli::main_with_args(std::env::args_os()));
}
