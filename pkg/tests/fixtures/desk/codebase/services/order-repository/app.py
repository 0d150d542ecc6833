"""entrypoint for order-repository"""
