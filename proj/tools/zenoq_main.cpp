#include "zenoq/cli.hpp"

int main(int argc, char** argv) { return zenoq::run(argc, argv); }
