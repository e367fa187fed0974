#include "qcorr/cli_app.hpp"

int main(int argc, char** argv) { return qcorr::cli::run(argc, argv); }
