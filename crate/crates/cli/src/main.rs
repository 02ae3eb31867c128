fn main() {
    std::process::exit(coin_duel_cli::main_entry());
}
