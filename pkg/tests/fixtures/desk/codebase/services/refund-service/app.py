"""entrypoint for refund-service"""
