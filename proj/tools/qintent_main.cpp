#include "qintent/cli.hpp"

int main(int argc, char** argv) { return qintent::cli::dispatch(argc, argv); }
